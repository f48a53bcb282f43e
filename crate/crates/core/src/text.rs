//! Text formats: graph documents, element expressions, monoid expressions,
//! and projective-presentation files.
//!
//! The element grammar (tightest first): postfix `^` for the involution,
//! `.` for algebra multiplication, scalar `*`, then `+`/`-`. Identifiers
//! resolve by namespace; family members are written `id[n]`. Graph documents
//! are line-oriented sections with `#` comments.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num::{BigInt, BigRational};

use crate::error::{LpaError, Result};
use crate::graph::{EdgeFamily, EdgeFamilyKind, EdgeRef, Graph, Path, VertexRef};
use crate::lpa::{self, LpaElement, Monomial, Scalar};
use crate::monoid::{MonoidElement, MonoidGen, ProjectiveSpec, ProjectiveSummand};

// ---------------------------------------------------------------------------
// Graph documents
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Vertices,
    VertexFamilies,
    Edges,
    EdgeFamilies,
    StabilizedFamilies,
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn parse_vertex_ref(g: &Graph, token: &str, line_no: usize) -> Result<VertexRef> {
    let vr = parse_ref_token(token, line_no)?;
    match &vr {
        RefToken::Plain(id) => {
            if g.vertices.contains(id) {
                Ok(VertexRef::concrete(id.clone()))
            } else {
                Err(LpaError::parse(
                    line_no,
                    1,
                    format!("unknown vertex `{id}`"),
                ))
            }
        }
        RefToken::Indexed(id, n) => {
            if g.vertex_families.contains(id) {
                Ok(VertexRef::member(id.clone(), *n))
            } else {
                Err(LpaError::parse(
                    line_no,
                    1,
                    format!("unknown vertex family `{id}`"),
                ))
            }
        }
    }
}

enum RefToken {
    Plain(String),
    Indexed(String, u64),
}

fn parse_ref_token(token: &str, line_no: usize) -> Result<RefToken> {
    let token = token.trim();
    if let Some(open) = token.find('[') {
        if !token.ends_with(']') {
            return Err(LpaError::parse(line_no, open + 1, "unclosed `[`"));
        }
        let id = token[..open].to_string();
        let idx: u64 = token[open + 1..token.len() - 1]
            .trim()
            .parse()
            .map_err(|_| LpaError::parse(line_no, open + 2, "invalid family index"))?;
        if idx == 0 {
            return Err(LpaError::parse(line_no, open + 2, "indices are 1-based"));
        }
        Ok(RefToken::Indexed(id, idx))
    } else {
        Ok(RefToken::Plain(token.to_string()))
    }
}

fn parse_skip_set(text: &str, line_no: usize) -> Result<BTreeSet<u64>> {
    let inner = text
        .trim()
        .strip_prefix('{')
        .and_then(|t| t.strip_suffix('}'))
        .ok_or_else(|| LpaError::parse(line_no, 1, "skip set must be `{n,...}`"))?;
    let mut out = BTreeSet::new();
    for part in inner.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let n: u64 = part
            .parse()
            .map_err(|_| LpaError::parse(line_no, 1, format!("invalid index `{part}`")))?;
        out.insert(n);
    }
    Ok(out)
}

/// Parses a graph document.
pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut g = Graph::new();
    let mut section = Section::None;
    // Edge lines are resolved after all vertices are known.
    let mut edge_lines: Vec<(usize, String)> = Vec::new();
    let mut family_lines: Vec<(usize, String)> = Vec::new();
    let mut stabilized: Vec<(usize, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        match line {
            "VERTICES" => {
                section = Section::Vertices;
                continue;
            }
            "VERTEX_FAMILIES" => {
                section = Section::VertexFamilies;
                continue;
            }
            "EDGES" => {
                section = Section::Edges;
                continue;
            }
            "EDGE_FAMILIES" => {
                section = Section::EdgeFamilies;
                continue;
            }
            "STABILIZED_FAMILIES" => {
                section = Section::StabilizedFamilies;
                continue;
            }
            _ => {}
        }
        match section {
            Section::None => return Err(LpaError::parse(line_no, 1, "content before any section")),
            Section::Vertices => g
                .add_vertex(line)
                .map_err(|e| LpaError::parse(line_no, 1, e.to_string()))?,
            Section::VertexFamilies => g
                .add_vertex_family(line)
                .map_err(|e| LpaError::parse(line_no, 1, e.to_string()))?,
            Section::Edges => edge_lines.push((line_no, line.to_string())),
            Section::EdgeFamilies => family_lines.push((line_no, line.to_string())),
            Section::StabilizedFamilies => stabilized.push((line_no, line.to_string())),
        }
    }
    for (line_no, line) in edge_lines {
        let (id, src, dst, rest) = split_edge_line(&line, line_no)?;
        if !rest.is_empty() {
            return Err(LpaError::parse(line_no, 1, "trailing content on edge line"));
        }
        let source = parse_vertex_ref(&g, &src, line_no)?;
        let range = parse_vertex_ref(&g, &dst, line_no)?;
        g.add_edge(id, source, range)
            .map_err(|e| LpaError::parse(line_no, 1, e.to_string()))?;
    }
    for (line_no, line) in family_lines {
        let (id, src, dst, rest) = split_edge_line(&line, line_no)?;
        let excluded = if rest.is_empty() {
            BTreeSet::new()
        } else if let Some(set) = rest.strip_prefix("skip") {
            parse_skip_set(set, line_no)?
        } else {
            return Err(LpaError::parse(line_no, 1, "expected `skip {n,...}`"));
        };
        let kind = if g.vertex_families.contains(&src) {
            // Chain family: members run down the source family to the base.
            EdgeFamilyKind::Chain {
                family: src,
                base: parse_vertex_ref(&g, &dst, line_no)?,
            }
        } else if g.vertices.contains(&src) {
            if g.vertex_families.contains(&dst) {
                EdgeFamilyKind::Diagonal {
                    source: src,
                    family: dst,
                }
            } else {
                EdgeFamilyKind::Constant {
                    source: src,
                    range: parse_vertex_ref(&g, &dst, line_no)?,
                }
            }
        } else {
            return Err(LpaError::parse(
                line_no,
                1,
                format!("unknown source `{src}`"),
            ));
        };
        g.add_edge_family(id, EdgeFamily { kind, excluded })
            .map_err(|e| LpaError::parse(line_no, 1, e.to_string()))?;
    }
    for (line_no, fam) in stabilized {
        if !g.vertex_families.contains(&fam) {
            return Err(LpaError::parse(
                line_no,
                1,
                format!("unknown vertex family `{fam}`"),
            ));
        }
        g.stabilized_families.insert(fam);
    }
    g.validate()?;
    Ok(g)
}

fn split_edge_line(line: &str, line_no: usize) -> Result<(String, String, String, String)> {
    let (id, rest) = line
        .split_once(':')
        .ok_or_else(|| LpaError::parse(line_no, 1, "expected `id: src -> dst`"))?;
    let (src, dst) = rest
        .split_once("->")
        .ok_or_else(|| LpaError::parse(line_no, 1, "expected `src -> dst`"))?;
    let dst = dst.trim();
    let (dst, trailing) = match dst.find(char::is_whitespace) {
        Some(i) => (&dst[..i], dst[i..].trim()),
        None => (dst, ""),
    };
    Ok((
        id.trim().to_string(),
        src.trim().to_string(),
        dst.to_string(),
        trailing.to_string(),
    ))
}

/// Prints a graph document; `parse_graph(print_graph(g)) == g`.
pub fn print_graph(g: &Graph) -> String {
    let mut out = String::new();
    if !g.vertices.is_empty() {
        out.push_str("VERTICES\n");
        for v in &g.vertices {
            let _ = writeln!(out, "{v}");
        }
    }
    if !g.vertex_families.is_empty() {
        out.push_str("VERTEX_FAMILIES\n");
        for v in &g.vertex_families {
            let _ = writeln!(out, "{v}");
        }
    }
    if !g.edges.is_empty() {
        out.push_str("EDGES\n");
        for (id, e) in &g.edges {
            let _ = writeln!(out, "{id}: {} -> {}", e.source, e.range);
        }
    }
    if !g.edge_families.is_empty() {
        out.push_str("EDGE_FAMILIES\n");
        for (id, fam) in &g.edge_families {
            let (src, dst) = match &fam.kind {
                EdgeFamilyKind::Constant { source, range } => (source.clone(), range.to_string()),
                EdgeFamilyKind::Diagonal { source, family } => (source.clone(), family.clone()),
                EdgeFamilyKind::Chain { family, base } => (family.clone(), base.to_string()),
            };
            let _ = write!(out, "{id}: {src} -> {dst}");
            if !fam.excluded.is_empty() {
                let items: Vec<String> = fam.excluded.iter().map(|n| n.to_string()).collect();
                let _ = write!(out, " skip {{{}}}", items.join(","));
            }
            out.push('\n');
        }
    }
    if !g.stabilized_families.is_empty() {
        out.push_str("STABILIZED_FAMILIES\n");
        for fam in &g.stabilized_families {
            let _ = writeln!(out, "{fam}");
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Lexer for expressions
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(String),
    Caret,
    Dot,
    Star,
    Plus,
    Minus,
    Slash,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Semi,
    Comma,
}

#[derive(Debug, Clone)]
struct Lexed {
    tok: Tok,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Lexed>> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let simple = match c {
            '^' => Some(Tok::Caret),
            '.' => Some(Tok::Dot),
            '*' => Some(Tok::Star),
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '/' => Some(Tok::Slash),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            ';' => Some(Tok::Semi),
            ',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push(Lexed { tok, col });
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            out.push(Lexed {
                tok: Tok::Int(chars[start..i].iter().collect()),
                col,
            });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len()
                && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'')
            {
                i += 1;
            }
            out.push(Lexed {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                col,
            });
            continue;
        }
        return Err(LpaError::parse(
            1,
            col,
            format!("unexpected character `{c}`"),
        ));
    }
    Ok(out)
}

struct Cursor {
    toks: Vec<Lexed>,
    pos: usize,
}

impl Cursor {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|l| &l.tok)
    }

    fn col(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|l| l.col)
            .unwrap_or_else(|| self.toks.last().map(|l| l.col + 1).unwrap_or(1))
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|l| l.tok.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        let col = self.col();
        match self.next() {
            Some(t) if t == tok => Ok(()),
            _ => Err(LpaError::parse(1, col, format!("expected {what}"))),
        }
    }
}

fn parse_rational(cur: &mut Cursor) -> Result<Scalar> {
    let col = cur.col();
    let numer = match cur.next() {
        Some(Tok::Int(s)) => s,
        _ => return Err(LpaError::parse(1, col, "expected number")),
    };
    let numer: BigInt = numer.parse().expect("digits");
    if cur.peek() == Some(&Tok::Slash) {
        cur.next();
        let col = cur.col();
        let denom = match cur.next() {
            Some(Tok::Int(s)) => s,
            _ => return Err(LpaError::parse(1, col, "expected denominator")),
        };
        let denom: BigInt = denom.parse().expect("digits");
        if denom == BigInt::from(0) {
            return Err(LpaError::parse(1, col, "zero denominator"));
        }
        Ok(BigRational::new(numer, denom))
    } else {
        Ok(BigRational::from_integer(numer))
    }
}

fn parse_generator_ref(cur: &mut Cursor) -> Result<(String, Option<u64>, usize)> {
    let col = cur.col();
    let id = match cur.next() {
        Some(Tok::Ident(s)) => s,
        _ => return Err(LpaError::parse(1, col, "expected identifier")),
    };
    let mut index = None;
    if cur.peek() == Some(&Tok::LBracket) {
        cur.next();
        let icol = cur.col();
        match cur.next() {
            Some(Tok::Int(s)) => {
                let n: u64 = s
                    .parse()
                    .map_err(|_| LpaError::parse(1, icol, "index out of range"))?;
                if n == 0 {
                    return Err(LpaError::parse(1, icol, "indices are 1-based"));
                }
                index = Some(n);
            }
            _ => return Err(LpaError::parse(1, icol, "expected index")),
        }
        cur.expect(Tok::RBracket, "`]`")?;
    }
    Ok((id, index, col))
}

// ---------------------------------------------------------------------------
// Element expressions
// ---------------------------------------------------------------------------

/// A factor value with purity tracking: real-path literals keep their path so
/// a non-composable concatenation of plain paths is a parse error rather
/// than a silent zero.
struct Factor {
    value: LpaElement,
    pure: Option<Path>,
}

fn resolve_atom(g: &Graph, id: &str, index: Option<u64>, col: usize) -> Result<Factor> {
    match index {
        None => {
            if g.vertices.contains(id) {
                let p = Path::vertex(g, VertexRef::concrete(id))?;
                return Ok(Factor {
                    value: LpaElement::from_monomial(Monomial::path(g, p.clone())?),
                    pure: Some(p),
                });
            }
            if g.edges.contains_key(id) {
                let p = Path::single(g, EdgeRef::concrete(id))?;
                return Ok(Factor {
                    value: LpaElement::from_monomial(Monomial::path(g, p.clone())?),
                    pure: Some(p),
                });
            }
            if g.vertex_families.contains(id) || g.edge_families.contains_key(id) {
                return Err(LpaError::parse(
                    1,
                    col,
                    format!("family `{id}` requires an index"),
                ));
            }
            Err(LpaError::parse(
                1,
                col,
                format!("unknown identifier `{id}`"),
            ))
        }
        Some(n) => {
            if g.vertex_families.contains(id) {
                let p = Path::vertex(g, VertexRef::member(id, n))?;
                return Ok(Factor {
                    value: LpaElement::from_monomial(Monomial::path(g, p.clone())?),
                    pure: Some(p),
                });
            }
            if g.edge_families.contains_key(id) {
                let e = EdgeRef::member(id, n);
                g.check_edge(&e)
                    .map_err(|err| LpaError::parse(1, col, err.to_string()))?;
                let p = Path::single(g, e)?;
                return Ok(Factor {
                    value: LpaElement::from_monomial(Monomial::path(g, p.clone())?),
                    pure: Some(p),
                });
            }
            if g.vertices.contains(id) || g.edges.contains_key(id) {
                return Err(LpaError::parse(
                    1,
                    col,
                    format!("`{id}` is not a family and takes no index"),
                ));
            }
            Err(LpaError::parse(
                1,
                col,
                format!("unknown identifier `{id}`"),
            ))
        }
    }
}

fn parse_factor(g: &Graph, cur: &mut Cursor) -> Result<Factor> {
    let mut factor = match cur.peek() {
        Some(Tok::LParen) => {
            cur.next();
            let inner = parse_sum(g, cur)?;
            cur.expect(Tok::RParen, "`)`")?;
            Factor {
                value: inner,
                pure: None,
            }
        }
        _ => {
            let (id, index, col) = parse_generator_ref(cur)?;
            resolve_atom(g, &id, index, col)?
        }
    };
    while cur.peek() == Some(&Tok::Caret) {
        cur.next();
        factor = Factor {
            value: lpa::star(&factor.value),
            pure: None,
        };
    }
    Ok(factor)
}

fn parse_product(g: &Graph, cur: &mut Cursor) -> Result<LpaElement> {
    let mut acc = parse_factor(g, cur)?;
    while cur.peek() == Some(&Tok::Dot) {
        cur.next();
        let col = cur.col();
        let rhs = parse_factor(g, cur)?;
        if let (Some(p), Some(q)) = (&acc.pure, &rhs.pure) {
            if &p.range(g)? != q.source() {
                return Err(LpaError::parse(
                    1,
                    col,
                    format!("paths are not composable: r({p}) != s({q})"),
                ));
            }
        }
        let pure = match (&acc.pure, &rhs.pure) {
            (Some(p), Some(q)) => Some(crate::graph::compose_paths(g, p, q)?),
            _ => None,
        };
        acc = Factor {
            value: lpa::mul(g, &acc.value, &rhs.value)?,
            pure,
        };
    }
    Ok(acc.value)
}

fn parse_term(g: &Graph, cur: &mut Cursor) -> Result<LpaElement> {
    if matches!(cur.peek(), Some(Tok::Int(_))) {
        let k = parse_rational(cur)?;
        cur.expect(Tok::Star, "`*` after scalar")?;
        let body = parse_product(g, cur)?;
        return Ok(body.scale(&k));
    }
    parse_product(g, cur)
}

fn parse_sum(g: &Graph, cur: &mut Cursor) -> Result<LpaElement> {
    let mut negate = false;
    if cur.peek() == Some(&Tok::Minus) {
        cur.next();
        negate = true;
    }
    let mut acc = parse_term(g, cur)?;
    if negate {
        acc = acc.neg();
    }
    loop {
        match cur.peek() {
            Some(Tok::Plus) => {
                cur.next();
                acc = acc.add(&parse_term(g, cur)?);
            }
            Some(Tok::Minus) => {
                cur.next();
                acc = acc.sub(&parse_term(g, cur)?);
            }
            _ => break,
        }
    }
    Ok(acc)
}

/// Parses an (unnormalized) element expression over `g`.
pub fn parse_element(text: &str, g: &Graph) -> Result<LpaElement> {
    let mut cur = Cursor {
        toks: lex(text)?,
        pos: 0,
    };
    if cur.peek().is_none() {
        return Err(LpaError::parse(1, 1, "empty expression"));
    }
    let out = parse_sum(g, &mut cur)?;
    if cur.peek().is_some() {
        return Err(LpaError::parse(1, cur.col(), "trailing input"));
    }
    Ok(out)
}

/// Prints an element in the expression grammar.
pub fn print_element(a: &LpaElement) -> String {
    a.to_string()
}

/// Parses a plain path: a vertex reference (empty path) or dot-joined edges.
pub fn parse_path(text: &str, g: &Graph) -> Result<Path> {
    let mut cur = Cursor {
        toks: lex(text)?,
        pos: 0,
    };
    let (id, index, col) = parse_generator_ref(&mut cur)?;
    let vertex_like = match index {
        None => g.vertices.contains(&id),
        Some(_) => g.vertex_families.contains(&id),
    };
    let path = if vertex_like {
        let v = match index {
            None => VertexRef::concrete(&id),
            Some(n) => VertexRef::member(&id, n),
        };
        Path::vertex(g, v)?
    } else {
        let e = match index {
            None => EdgeRef::concrete(&id),
            Some(n) => EdgeRef::member(&id, n),
        };
        g.check_edge(&e)
            .map_err(|err| LpaError::parse(1, col, err.to_string()))?;
        let mut p = Path::single(g, e)?;
        while cur.peek() == Some(&Tok::Dot) {
            cur.next();
            let (eid, eindex, ecol) = parse_generator_ref(&mut cur)?;
            let e = match eindex {
                None => EdgeRef::concrete(&eid),
                Some(n) => EdgeRef::member(&eid, n),
            };
            g.check_edge(&e)
                .map_err(|err| LpaError::parse(1, ecol, err.to_string()))?;
            let next = Path::single(g, e)?;
            p = crate::graph::compose_paths(g, &p, &next)?;
        }
        p
    };
    if cur.peek().is_some() {
        return Err(LpaError::parse(1, cur.col(), "trailing input"));
    }
    Ok(path)
}

// ---------------------------------------------------------------------------
// Monoid expressions
// ---------------------------------------------------------------------------

fn resolve_monoid_vertex(g: &Graph, id: &str, index: Option<u64>, col: usize) -> Result<VertexRef> {
    match index {
        None if g.vertices.contains(id) => Ok(VertexRef::concrete(id)),
        Some(n) if g.vertex_families.contains(id) => Ok(VertexRef::member(id, n)),
        _ => Err(LpaError::parse(1, col, format!("unknown vertex `{id}`"))),
    }
}

fn resolve_monoid_edge(g: &Graph, id: &str, index: Option<u64>, col: usize) -> Result<EdgeRef> {
    let e = match index {
        None => EdgeRef::concrete(id),
        Some(n) => EdgeRef::member(id, n),
    };
    g.check_edge(&e)
        .map_err(|err| LpaError::parse(1, col, err.to_string()))?;
    Ok(e)
}

fn parse_monoid_gen(g: &Graph, cur: &mut Cursor) -> Result<MonoidGen> {
    let (id, index, col) = parse_generator_ref(cur)?;
    if id == "q" && index.is_none() && cur.peek() == Some(&Tok::LParen) {
        cur.next();
        let (vid, vindex, vcol) = parse_generator_ref(cur)?;
        let vertex = resolve_monoid_vertex(g, &vid, vindex, vcol)?;
        cur.expect(Tok::Semi, "`;`")?;
        cur.expect(Tok::LBrace, "`{`")?;
        let mut edges = BTreeSet::new();
        loop {
            let (eid, eindex, ecol) = parse_generator_ref(cur)?;
            edges.insert(resolve_monoid_edge(g, &eid, eindex, ecol)?);
            match cur.next() {
                Some(Tok::Comma) => continue,
                Some(Tok::RBrace) => break,
                _ => return Err(LpaError::parse(1, cur.col(), "expected `,` or `}`")),
            }
        }
        cur.expect(Tok::RParen, "`)`")?;
        return Ok(MonoidGen::Q { vertex, edges });
    }
    Ok(MonoidGen::Vertex(resolve_monoid_vertex(
        g, &id, index, col,
    )?))
}

/// Parses a monoid expression: terms `[n*] gen` joined by `+`, where `gen`
/// is a vertex reference or `q(v;{e,...})`.
pub fn parse_monoid_element(text: &str, g: &Graph) -> Result<MonoidElement> {
    let mut cur = Cursor {
        toks: lex(text)?,
        pos: 0,
    };
    let mut out = MonoidElement::zero();
    loop {
        let mut mult = 1u64;
        if let Some(Tok::Int(s)) = cur.peek() {
            let col = cur.col();
            mult = s
                .parse()
                .map_err(|_| LpaError::parse(1, col, "multiplicity out of range"))?;
            cur.next();
            cur.expect(Tok::Star, "`*` after multiplicity")?;
        }
        out.add(parse_monoid_gen(g, &mut cur)?, mult);
        match cur.peek() {
            Some(Tok::Plus) => {
                cur.next();
            }
            None => break,
            _ => return Err(LpaError::parse(1, cur.col(), "trailing input")),
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Projective presentation files
// ---------------------------------------------------------------------------

/// Parses a presentation file: one summand `N (v; {e,...})` per line.
pub fn parse_spec(text: &str, g: &Graph) -> Result<ProjectiveSpec> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let mut cur = Cursor {
            toks: lex(line).map_err(|e| reline(e, line_no))?,
            pos: 0,
        };
        let col = cur.col();
        let mult: u64 = match cur.next() {
            Some(Tok::Int(s)) => s
                .parse()
                .map_err(|_| LpaError::parse(line_no, col, "multiplicity out of range"))?,
            _ => return Err(LpaError::parse(line_no, col, "expected multiplicity")),
        };
        cur.expect(Tok::LParen, "`(`")
            .map_err(|e| reline(e, line_no))?;
        let (vid, vindex, vcol) = parse_generator_ref(&mut cur).map_err(|e| reline(e, line_no))?;
        let vertex =
            resolve_monoid_vertex(g, &vid, vindex, vcol).map_err(|e| reline(e, line_no))?;
        cur.expect(Tok::Semi, "`;`")
            .map_err(|e| reline(e, line_no))?;
        cur.expect(Tok::LBrace, "`{`")
            .map_err(|e| reline(e, line_no))?;
        let mut edges = BTreeSet::new();
        if cur.peek() == Some(&Tok::RBrace) {
            cur.next();
        } else {
            loop {
                let (eid, eindex, ecol) =
                    parse_generator_ref(&mut cur).map_err(|e| reline(e, line_no))?;
                edges.insert(
                    resolve_monoid_edge(g, &eid, eindex, ecol).map_err(|e| reline(e, line_no))?,
                );
                match cur.next() {
                    Some(Tok::Comma) => continue,
                    Some(Tok::RBrace) => break,
                    _ => return Err(LpaError::parse(line_no, cur.col(), "expected `,` or `}`")),
                }
            }
        }
        cur.expect(Tok::RParen, "`)`")
            .map_err(|e| reline(e, line_no))?;
        if cur.peek().is_some() {
            return Err(LpaError::parse(line_no, cur.col(), "trailing input"));
        }
        out.push(ProjectiveSummand {
            vertex,
            edges,
            mult,
        });
    }
    crate::monoid::validate_spec(g, &out)?;
    Ok(out)
}

fn reline(e: LpaError, line_no: usize) -> LpaError {
    match e {
        LpaError::Parse {
            column, message, ..
        } => LpaError::Parse {
            line: line_no,
            column,
            message,
        },
        other => other,
    }
}

/// Prints a presentation file.
pub fn print_spec(s: &ProjectiveSpec) -> String {
    let mut out = String::new();
    for summand in s {
        let items: Vec<String> = summand.edges.iter().map(|e| e.to_string()).collect();
        let _ = writeln!(
            out,
            "{} ({}; {{{}}})",
            summand.mult,
            summand.vertex,
            items.join(",")
        );
    }
    out
}
