//! Command-line surface over the engine: thirteen subcommands on graph
//! documents and element expressions. All output is deterministic; exit code
//! 0 on success, 1 on `Unknown` verdicts or failed checks, 2 on errors.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use lpa_core::{
    assemble_universe, audit_witness, convolve, equivalent, evaluate, graded_components, mul,
    normal_form, normalize_projective_spec, out_split, parse_element, parse_graph,
    parse_monoid_element, parse_path, parse_spec, pi_map, print_graph, print_spec, restrict_basis,
    star, BoundaryPoint, EdgeRef, Equivalence, Graph, GroupoidPoint, LpaError, Path, PipelineKind,
    PipelineReport, Result, VertexRef,
};

pub const HELP: &str = "\
lpa — exact computation in Leavitt path algebras of directed graphs

USAGE
  lpa <command> <graph-file> [args] [flags]

COMMANDS
  validate <graph>                       parse and validate a graph document
  nf <graph> <expr>                      normal form of an element
  mul <graph> <expr> <expr>              normal form of a product
  star <graph> <expr>                    involution of an element
  grade <graph> <expr>                   graded components of the normal form
  monoid-eq <graph> <m> <m> [--depth N]  bounded graph-monoid equivalence
  decompose <graph> <spec-file>          normalize a projective presentation
  outsplit <graph> <vertex> <e,e,...>    out-split at a vertex
  pipeline-end <graph> <spec-file>       endomorphism-ring pipeline report
  pipeline-cstar <graph> <spec-file>     stabilized pipeline report
  corner-basis <graph> <v,v,...>         restricted-groupoid basis
      [--maxlen N] [--limit N]
  steinberg-check <graph> <expr> <expr>  pi homomorphism check on a product
  eval <graph> <expr> [--mu P] [--nu P]  evaluate at a groupoid point
      (--tail P | --lasso PREFIX:CYCLE)

Monoid expressions use vertex references and q-generators `q(v;{e[1]})`.
Paths are dot-joined edges, or a single vertex for the empty path.

EXIT CODES
  0 success; 1 Unknown verdict / failed check; 2 error.
";

/// Result of a single invocation.
pub struct Outcome {
    pub code: i32,
    pub report: String,
}

/// Runs one command. `argv` excludes the program name.
pub fn run_command<S: AsRef<str>>(argv: &[S]) -> Outcome {
    let args: Vec<String> = argv.iter().map(|s| s.as_ref().to_string()).collect();
    if args.is_empty() || args[0] == "--help" || args[0] == "help" {
        return Outcome {
            code: if args.is_empty() { 2 } else { 0 },
            report: HELP.to_string(),
        };
    }
    match dispatch(&args) {
        Ok((code, report)) => Outcome { code, report },
        Err(e) => Outcome {
            code: 2,
            report: format!("error: {e}\n"),
        },
    }
}

struct Args {
    positional: Vec<String>,
    flags: BTreeMap<String, String>,
}

fn split_args(args: &[String]) -> Result<Args> {
    let mut positional = Vec::new();
    let mut flags = BTreeMap::new();
    let mut i = 0;
    while i < args.len() {
        if let Some(name) = args[i].strip_prefix("--") {
            let value = args
                .get(i + 1)
                .ok_or_else(|| LpaError::Usage(format!("flag --{name} needs a value")))?;
            flags.insert(name.to_string(), value.clone());
            i += 2;
        } else {
            positional.push(args[i].clone());
            i += 1;
        }
    }
    Ok(Args { positional, flags })
}

impl Args {
    fn expect(&self, n: usize, usage: &str) -> Result<()> {
        if self.positional.len() != n {
            return Err(LpaError::Usage(format!("usage: {usage}")));
        }
        Ok(())
    }

    fn flag_u64(&self, name: &str, default: u64) -> Result<u64> {
        match self.flags.get(name) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| LpaError::Usage(format!("--{name} expects an integer"))),
        }
    }
}

fn load_graph(path: &str) -> Result<Graph> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| LpaError::Usage(format!("cannot read `{path}`: {e}")))?;
    parse_graph(&text)
}

fn load_spec(path: &str, g: &Graph) -> Result<lpa_core::ProjectiveSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| LpaError::Usage(format!("cannot read `{path}`: {e}")))?;
    parse_spec(&text, g)
}

fn parse_vertex(text: &str, g: &Graph) -> Result<VertexRef> {
    let p = parse_path(text, g)?;
    if !p.is_empty() {
        return Err(LpaError::Usage(format!("`{text}` is not a vertex")));
    }
    Ok(p.source().clone())
}

fn parse_edge_list(text: &str, g: &Graph) -> Result<BTreeSet<EdgeRef>> {
    let mut out = BTreeSet::new();
    for part in text.split(',') {
        let p = parse_path(part.trim(), g)?;
        if p.len() != 1 {
            return Err(LpaError::Usage(format!("`{part}` is not an edge")));
        }
        out.insert(p.edges()[0].clone());
    }
    Ok(out)
}

fn parse_vertex_list(text: &str, g: &Graph) -> Result<BTreeSet<VertexRef>> {
    text.split(',')
        .map(|part| parse_vertex(part.trim(), g))
        .collect()
}

fn format_pipeline(report: &PipelineReport) -> String {
    let mut out = String::new();
    let kind = match report.kind {
        PipelineKind::End => "end",
        PipelineKind::CStar => "cstar",
    };
    let _ = writeln!(out, "kind: {kind}");
    let h: Vec<String> = report.h.iter().map(|v| v.to_string()).collect();
    let _ = writeln!(out, "H = {{{}}}", h.join(", "));
    let _ = writeln!(
        out,
        "shape: {}x{}",
        report.matrix_shape.len(),
        report.matrix_shape.first().map(|r| r.len()).unwrap_or(0)
    );
    out.push_str("blocks:\n");
    for row in &report.matrix_shape {
        let _ = writeln!(out, "  [{}]", row.join(" | "));
    }
    let _ = writeln!(
        out,
        "basis sample ({} elements):",
        report.sample_basis.len()
    );
    for b in &report.sample_basis {
        let _ = writeln!(out, "  Z({}, {})", b.alpha, b.beta);
    }
    out.push_str("trace:\n");
    for line in &report.trace {
        let _ = writeln!(out, "  {line}");
    }
    out.push_str("final graph:\n");
    out.push_str(&print_graph(&report.final_graph));
    out
}

fn dispatch(args: &[String]) -> Result<(i32, String)> {
    let command = args[0].as_str();
    let rest = split_args(&args[1..])?;
    match command {
        "validate" => {
            rest.expect(1, "validate <graph>")?;
            let g = load_graph(&rest.positional[0])?;
            Ok((
                0,
                format!(
                    "ok: {} vertices, {} vertex families, {} edges, {} edge families\n",
                    g.vertices.len(),
                    g.vertex_families.len(),
                    g.edges.len(),
                    g.edge_families.len()
                ),
            ))
        }
        "nf" => {
            rest.expect(2, "nf <graph> <expr>")?;
            let g = load_graph(&rest.positional[0])?;
            let a = parse_element(&rest.positional[1], &g)?;
            Ok((0, format!("{}\n", normal_form(&g, &a)?)))
        }
        "mul" => {
            rest.expect(3, "mul <graph> <expr> <expr>")?;
            let g = load_graph(&rest.positional[0])?;
            let a = parse_element(&rest.positional[1], &g)?;
            let b = parse_element(&rest.positional[2], &g)?;
            Ok((0, format!("{}\n", normal_form(&g, &mul(&g, &a, &b)?)?)))
        }
        "star" => {
            rest.expect(2, "star <graph> <expr>")?;
            let g = load_graph(&rest.positional[0])?;
            let a = parse_element(&rest.positional[1], &g)?;
            Ok((0, format!("{}\n", star(&a))))
        }
        "grade" => {
            rest.expect(2, "grade <graph> <expr>")?;
            let g = load_graph(&rest.positional[0])?;
            let a = normal_form(&g, &parse_element(&rest.positional[1], &g)?)?;
            let comps = graded_components(&a);
            if comps.is_empty() {
                return Ok((0, "0\n".to_string()));
            }
            let mut out = String::new();
            for (d, c) in comps {
                let _ = writeln!(out, "{d}: {c}");
            }
            Ok((0, out))
        }
        "monoid-eq" => {
            rest.expect(3, "monoid-eq <graph> <elem> <elem> [--depth N]")?;
            let g = load_graph(&rest.positional[0])?;
            let x = parse_monoid_element(&rest.positional[1], &g)?;
            let y = parse_monoid_element(&rest.positional[2], &g)?;
            let depth = rest.flag_u64("depth", 8)? as u32;
            let universe = assemble_universe(&[&x, &y]);
            match equivalent(&g, &x, &y, &universe, depth)? {
                Equivalence::Yes(w) => {
                    if !audit_witness(&g, &x, &y, &universe, &w)? {
                        return Err(LpaError::Pipeline(
                            "witness failed replay audit".to_string(),
                        ));
                    }
                    Ok((
                        0,
                        format!(
                            "Yes\ncommon: {}\nsteps: {} / {}\n",
                            w.common(),
                            w.from_x.len() - 1,
                            w.from_y.len() - 1
                        ),
                    ))
                }
                Equivalence::Unknown => Ok((1, format!("Unknown (depth {depth})\n"))),
            }
        }
        "decompose" => {
            rest.expect(2, "decompose <graph> <spec-file>")?;
            let g = load_graph(&rest.positional[0])?;
            let s = load_spec(&rest.positional[1], &g)?;
            Ok((0, print_spec(&normalize_projective_spec(&g, &s)?)))
        }
        "outsplit" => {
            rest.expect(3, "outsplit <graph> <vertex> <edge,edge,...>")?;
            let g = load_graph(&rest.positional[0])?;
            let v = parse_vertex(&rest.positional[1], &g)?;
            let part = parse_edge_list(&rest.positional[2], &g)?;
            let split = out_split(&g, &v, &part)?;
            let mut out = format!(
                "split {} -> {}, {}\n",
                split.split_vertex, split.v1, split.v2
            );
            for (old, (e1, e2)) in &split.doubled_edges {
                let _ = writeln!(out, "doubled {old} -> {e1}, {e2}");
            }
            for (old, (f1, f2)) in &split.doubled_families {
                let _ = writeln!(out, "doubled family {old} -> {f1}, {f2}");
            }
            out.push_str(&print_graph(&split.graph));
            Ok((0, out))
        }
        "pipeline-end" => {
            rest.expect(2, "pipeline-end <graph> <spec-file>")?;
            let g = load_graph(&rest.positional[0])?;
            let s = load_spec(&rest.positional[1], &g)?;
            Ok((0, format_pipeline(&lpa_core::end_pipeline(&g, &s)?)))
        }
        "pipeline-cstar" => {
            rest.expect(2, "pipeline-cstar <graph> <spec-file>")?;
            let g = load_graph(&rest.positional[0])?;
            let s = load_spec(&rest.positional[1], &g)?;
            Ok((0, format_pipeline(&lpa_core::cstar_pipeline(&g, &s)?)))
        }
        "corner-basis" => {
            rest.expect(2, "corner-basis <graph> <v,v,...> [--maxlen N] [--limit N]")?;
            let g = load_graph(&rest.positional[0])?;
            let h = parse_vertex_list(&rest.positional[1], &g)?;
            let maxlen = rest.flag_u64("maxlen", 2)? as usize;
            let limit = rest.flag_u64("limit", 3)?;
            let basis = restrict_basis(&g, &h, maxlen, limit)?;
            let mut out = format!("{} basis elements\n", basis.len());
            for b in &basis {
                let _ = writeln!(out, "Z({}, {})", b.alpha, b.beta);
            }
            Ok((0, out))
        }
        "steinberg-check" => {
            rest.expect(3, "steinberg-check <graph> <expr> <expr>")?;
            let g = load_graph(&rest.positional[0])?;
            let a = parse_element(&rest.positional[1], &g)?;
            let b = parse_element(&rest.positional[2], &g)?;
            let lhs = pi_map(&normal_form(&g, &mul(&g, &a, &b)?)?);
            let rhs = convolve(&g, &pi_map(&a), &pi_map(&b))?;
            if lhs == rhs {
                Ok((0, "ok: pi(a.b) = pi(a) * pi(b)\n".to_string()))
            } else {
                Ok((1, "mismatch: pi(a.b) != pi(a) * pi(b)\n".to_string()))
            }
        }
        "eval" => {
            rest.expect(
                2,
                "eval <graph> <expr> [--mu P] [--nu P] (--tail P | --lasso PREFIX:CYCLE)",
            )?;
            let g = load_graph(&rest.positional[0])?;
            let a = parse_element(&rest.positional[1], &g)?;
            let tail = match (rest.flags.get("tail"), rest.flags.get("lasso")) {
                (Some(p), None) => BoundaryPoint::finite(&g, parse_path(p, &g)?)?,
                (None, Some(spec)) => {
                    let (prefix, cycle) = spec.split_once(':').ok_or_else(|| {
                        LpaError::Usage("--lasso expects PREFIX:CYCLE".to_string())
                    })?;
                    BoundaryPoint::lasso(&g, parse_path(prefix, &g)?, parse_path(cycle, &g)?)?
                }
                _ => {
                    return Err(LpaError::Usage(
                        "exactly one of --tail / --lasso is required".to_string(),
                    ))
                }
            };
            let start = tail.source().clone();
            let mu = match rest.flags.get("mu") {
                Some(p) => parse_path(p, &g)?,
                None => Path::vertex(&g, start.clone())?,
            };
            let nu = match rest.flags.get("nu") {
                Some(p) => parse_path(p, &g)?,
                None => Path::vertex(&g, start)?,
            };
            let pt = GroupoidPoint::new(&g, mu, nu, tail)?;
            let value = evaluate(&g, &pi_map(&a), &pt)?;
            Ok((0, format!("{value}\n")))
        }
        other => Err(LpaError::Usage(format!(
            "unknown command `{other}`; run with --help"
        ))),
    }
}
