//! Directed graphs with possibly infinite emitters.
//!
//! Infinite edge bundles are represented by ω-indexed families: a family `f`
//! stands for the edges `f_1, f_2, ...` with a uniform description of sources
//! and ranges. This finitely encodes every graph used by the pipelines here
//! (the infinite clock, graphs with `(∞)` edge bundles, stabilized graphs)
//! while individual family members remain addressable by index.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{LpaError, Result};

/// Reference to a vertex: a named vertex or the `n`-th member of a vertex family.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VertexRef {
    Concrete(String),
    FamilyMember(String, u64),
}

impl VertexRef {
    pub fn concrete(id: impl Into<String>) -> Self {
        VertexRef::Concrete(id.into())
    }

    pub fn member(family: impl Into<String>, index: u64) -> Self {
        assert!(index >= 1, "family indices are 1-based");
        VertexRef::FamilyMember(family.into(), index)
    }
}

impl fmt::Display for VertexRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VertexRef::Concrete(id) => write!(f, "{id}"),
            VertexRef::FamilyMember(id, n) => write!(f, "{id}[{n}]"),
        }
    }
}

/// Reference to an edge: a named edge or the `n`-th member of an edge family.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeRef {
    Concrete(String),
    FamilyMember(String, u64),
}

impl EdgeRef {
    pub fn concrete(id: impl Into<String>) -> Self {
        EdgeRef::Concrete(id.into())
    }

    pub fn member(family: impl Into<String>, index: u64) -> Self {
        assert!(index >= 1, "family indices are 1-based");
        EdgeRef::FamilyMember(family.into(), index)
    }
}

impl fmt::Display for EdgeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeRef::Concrete(id) => write!(f, "{id}"),
            EdgeRef::FamilyMember(id, n) => write!(f, "{id}[{n}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConcreteEdge {
    pub source: VertexRef,
    pub range: VertexRef,
}

/// Shape of an ω-indexed edge family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EdgeFamilyKind {
    /// `f_n : source -> range` for all n (an infinite bundle of parallel edges).
    Constant { source: String, range: VertexRef },
    /// `f_n : source -> family[n]` (one edge per member of a vertex family).
    Diagonal { source: String, family: String },
    /// `f_n : family[n] -> family[n-1]`, with `family[0] = base`.
    ///
    /// Encodes an infinite head `... -> w_2 -> w_1 -> base`.
    Chain { family: String, base: VertexRef },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeFamily {
    pub kind: EdgeFamilyKind,
    /// Indices carved out of the family (members materialized as concrete
    /// edges by an out-split no longer belong to the family).
    pub excluded: BTreeSet<u64>,
}

impl EdgeFamily {
    pub fn new(kind: EdgeFamilyKind) -> Self {
        EdgeFamily {
            kind,
            excluded: BTreeSet::new(),
        }
    }

    pub fn contains_index(&self, n: u64) -> bool {
        n >= 1 && !self.excluded.contains(&n)
    }
}

/// A directed graph with finite data plus ω-indexed vertex and edge families.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Graph {
    pub vertices: BTreeSet<String>,
    pub vertex_families: BTreeSet<String>,
    pub edges: BTreeMap<String, ConcreteEdge>,
    pub edge_families: BTreeMap<String, EdgeFamily>,
    /// Vertex families each of whose members carries an (unmaterialized)
    /// infinite head attached by stabilization. The heads feed *into* the
    /// members, so no existing vertex changes its outgoing structure.
    pub stabilized_families: BTreeSet<String>,
}

/// Classification of a vertex by its outgoing edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexClass {
    Sink,
    Regular,
    InfiniteEmitter,
}

impl fmt::Display for VertexClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VertexClass::Sink => write!(f, "sink"),
            VertexClass::Regular => write!(f, "regular"),
            VertexClass::InfiniteEmitter => write!(f, "infinite-emitter"),
        }
    }
}

impl Graph {
    pub fn new() -> Self {
        Graph::default()
    }

    pub fn add_vertex(&mut self, id: impl Into<String>) -> Result<()> {
        let id = id.into();
        self.check_fresh(&id)?;
        self.vertices.insert(id);
        Ok(())
    }

    pub fn add_vertex_family(&mut self, id: impl Into<String>) -> Result<()> {
        let id = id.into();
        self.check_fresh(&id)?;
        self.vertex_families.insert(id);
        Ok(())
    }

    pub fn add_edge(
        &mut self,
        id: impl Into<String>,
        source: VertexRef,
        range: VertexRef,
    ) -> Result<()> {
        let id = id.into();
        self.check_fresh(&id)?;
        self.check_vertex(&source)?;
        self.check_vertex(&range)?;
        self.edges.insert(id, ConcreteEdge { source, range });
        Ok(())
    }

    pub fn add_edge_family(&mut self, id: impl Into<String>, family: EdgeFamily) -> Result<()> {
        let id = id.into();
        self.check_fresh(&id)?;
        match &family.kind {
            EdgeFamilyKind::Constant { source, range } => {
                self.check_vertex(&VertexRef::Concrete(source.clone()))?;
                self.check_vertex(range)?;
            }
            EdgeFamilyKind::Diagonal { source, family } => {
                self.check_vertex(&VertexRef::Concrete(source.clone()))?;
                if !self.vertex_families.contains(family) {
                    return Err(LpaError::UnknownVertex(family.clone()));
                }
            }
            EdgeFamilyKind::Chain { family, base } => {
                if !self.vertex_families.contains(family) {
                    return Err(LpaError::UnknownVertex(family.clone()));
                }
                self.check_vertex(base)?;
            }
        }
        self.edge_families.insert(id, family);
        Ok(())
    }

    fn check_fresh(&self, id: &str) -> Result<()> {
        if self.id_taken(id) {
            return Err(LpaError::DuplicateIdentifier(id.to_string()));
        }
        Ok(())
    }

    pub fn id_taken(&self, id: &str) -> bool {
        self.vertices.contains(id)
            || self.vertex_families.contains(id)
            || self.edges.contains_key(id)
            || self.edge_families.contains_key(id)
    }

    /// Produces a fresh identifier derived from `base`.
    pub fn fresh_id(&self, base: &str) -> String {
        if !self.id_taken(base) {
            return base.to_string();
        }
        let mut candidate = format!("{base}'");
        while self.id_taken(&candidate) {
            candidate.push('\'');
        }
        candidate
    }

    pub fn check_vertex(&self, v: &VertexRef) -> Result<()> {
        let ok = match v {
            VertexRef::Concrete(id) => self.vertices.contains(id),
            VertexRef::FamilyMember(id, n) => *n >= 1 && self.vertex_families.contains(id),
        };
        if ok {
            Ok(())
        } else {
            Err(LpaError::UnknownVertex(v.to_string()))
        }
    }

    pub fn check_edge(&self, e: &EdgeRef) -> Result<()> {
        match e {
            EdgeRef::Concrete(id) => {
                if self.edges.contains_key(id) {
                    Ok(())
                } else {
                    Err(LpaError::UnknownEdge(e.to_string()))
                }
            }
            EdgeRef::FamilyMember(id, n) => match self.edge_families.get(id) {
                Some(fam) if fam.contains_index(*n) => Ok(()),
                _ => Err(LpaError::UnknownEdge(e.to_string())),
            },
        }
    }

    pub fn edge_source(&self, e: &EdgeRef) -> Result<VertexRef> {
        match e {
            EdgeRef::Concrete(id) => self
                .edges
                .get(id)
                .map(|edge| edge.source.clone())
                .ok_or_else(|| LpaError::UnknownEdge(e.to_string())),
            EdgeRef::FamilyMember(id, n) => {
                let fam = self
                    .edge_families
                    .get(id)
                    .filter(|f| f.contains_index(*n))
                    .ok_or_else(|| LpaError::UnknownEdge(e.to_string()))?;
                Ok(match &fam.kind {
                    EdgeFamilyKind::Constant { source, .. }
                    | EdgeFamilyKind::Diagonal { source, .. } => {
                        VertexRef::Concrete(source.clone())
                    }
                    EdgeFamilyKind::Chain { family, .. } => {
                        VertexRef::FamilyMember(family.clone(), *n)
                    }
                })
            }
        }
    }

    pub fn edge_range(&self, e: &EdgeRef) -> Result<VertexRef> {
        match e {
            EdgeRef::Concrete(id) => self
                .edges
                .get(id)
                .map(|edge| edge.range.clone())
                .ok_or_else(|| LpaError::UnknownEdge(e.to_string())),
            EdgeRef::FamilyMember(id, n) => {
                let fam = self
                    .edge_families
                    .get(id)
                    .filter(|f| f.contains_index(*n))
                    .ok_or_else(|| LpaError::UnknownEdge(e.to_string()))?;
                Ok(match &fam.kind {
                    EdgeFamilyKind::Constant { range, .. } => range.clone(),
                    EdgeFamilyKind::Diagonal { family, .. } => {
                        VertexRef::FamilyMember(family.clone(), *n)
                    }
                    EdgeFamilyKind::Chain { family, base } => {
                        if *n == 1 {
                            base.clone()
                        } else {
                            VertexRef::FamilyMember(family.clone(), *n - 1)
                        }
                    }
                })
            }
        }
    }

    /// Concrete edges plus family ids emitting from `v`. The family list is
    /// nonempty exactly when `v` is an infinite emitter.
    pub fn out_edges(&self, v: &VertexRef) -> Result<(Vec<EdgeRef>, Vec<String>)> {
        self.check_vertex(v)?;
        let mut concrete = Vec::new();
        for (id, edge) in &self.edges {
            if &edge.source == v {
                concrete.push(EdgeRef::Concrete(id.clone()));
            }
        }
        let mut families = Vec::new();
        match v {
            VertexRef::Concrete(vid) => {
                for (id, fam) in &self.edge_families {
                    match &fam.kind {
                        EdgeFamilyKind::Constant { source, .. }
                        | EdgeFamilyKind::Diagonal { source, .. } => {
                            if source == vid {
                                families.push(id.clone());
                            }
                        }
                        EdgeFamilyKind::Chain { .. } => {}
                    }
                }
            }
            VertexRef::FamilyMember(vfam, n) => {
                for (id, fam) in &self.edge_families {
                    if let EdgeFamilyKind::Chain { family, .. } = &fam.kind {
                        if family == vfam && fam.contains_index(*n) {
                            concrete.push(EdgeRef::FamilyMember(id.clone(), *n));
                        }
                    }
                }
            }
        }
        Ok((concrete, families))
    }

    pub fn classify_vertex(&self, v: &VertexRef) -> Result<VertexClass> {
        let (concrete, families) = self.out_edges(v)?;
        if !families.is_empty() {
            Ok(VertexClass::InfiniteEmitter)
        } else if concrete.is_empty() {
            Ok(VertexClass::Sink)
        } else {
            Ok(VertexClass::Regular)
        }
    }

    /// The full (finite) out-edge set of a regular vertex, sorted.
    pub fn regular_out_edges(&self, v: &VertexRef) -> Result<Option<Vec<EdgeRef>>> {
        let (mut concrete, families) = self.out_edges(v)?;
        if !families.is_empty() || concrete.is_empty() {
            return Ok(None);
        }
        concrete.sort();
        Ok(Some(concrete))
    }

    /// Out-edges with family members enumerated up to `family_limit`.
    pub fn out_edges_bounded(&self, v: &VertexRef, family_limit: u64) -> Result<Vec<EdgeRef>> {
        let (mut refs, families) = self.out_edges(v)?;
        for fam_id in families {
            let fam = &self.edge_families[&fam_id];
            for n in 1..=family_limit {
                if fam.contains_index(n) {
                    refs.push(EdgeRef::FamilyMember(fam_id.clone(), n));
                }
            }
        }
        refs.sort();
        Ok(refs)
    }

    /// Concrete edges and Constant families with range `v`.
    ///
    /// Returns an error when `v` receives edges this representation cannot
    /// split (a Diagonal family member or a Chain base), since callers use
    /// the receiver set to double edges during out-splitting.
    pub fn in_edges_for_split(&self, v: &VertexRef) -> Result<(Vec<String>, Vec<String>)> {
        let mut concrete = Vec::new();
        for (id, edge) in &self.edges {
            if &edge.range == v {
                concrete.push(id.clone());
            }
        }
        let mut families = Vec::new();
        for (id, fam) in &self.edge_families {
            match &fam.kind {
                EdgeFamilyKind::Constant { range, .. } => {
                    if range == v {
                        families.push(id.clone());
                    }
                }
                EdgeFamilyKind::Diagonal { family, .. } => {
                    if let VertexRef::FamilyMember(vf, _) = v {
                        if vf == family {
                            return Err(LpaError::OutSplit(format!(
                                "vertex {v} receives a diagonal family edge"
                            )));
                        }
                    }
                }
                EdgeFamilyKind::Chain { family, base } => {
                    if base == v {
                        return Err(LpaError::OutSplit(format!(
                            "vertex {v} is the base of chain family {id}"
                        )));
                    }
                    if let VertexRef::FamilyMember(vf, _) = v {
                        if vf == family {
                            return Err(LpaError::OutSplit(format!(
                                "vertex {v} receives a chain family edge"
                            )));
                        }
                    }
                }
            }
        }
        Ok((concrete, families))
    }

    /// Validates internal consistency: all stored references resolve.
    pub fn validate(&self) -> Result<()> {
        if self.vertices.is_empty() && self.vertex_families.is_empty() {
            return Err(LpaError::InvalidSpec("graph has no vertices".into()));
        }
        for edge in self.edges.values() {
            self.check_vertex(&edge.source)?;
            self.check_vertex(&edge.range)?;
        }
        for fam in self.edge_families.values() {
            match &fam.kind {
                EdgeFamilyKind::Constant { source, range } => {
                    self.check_vertex(&VertexRef::Concrete(source.clone()))?;
                    self.check_vertex(range)?;
                }
                EdgeFamilyKind::Diagonal { source, family } => {
                    self.check_vertex(&VertexRef::Concrete(source.clone()))?;
                    if !self.vertex_families.contains(family) {
                        return Err(LpaError::UnknownVertex(family.clone()));
                    }
                }
                EdgeFamilyKind::Chain { family, base } => {
                    if !self.vertex_families.contains(family) {
                        return Err(LpaError::UnknownVertex(family.clone()));
                    }
                    self.check_vertex(base)?;
                }
            }
        }
        for fam in &self.stabilized_families {
            if !self.vertex_families.contains(fam) {
                return Err(LpaError::UnknownVertex(fam.clone()));
            }
        }
        Ok(())
    }
}

/// A finite path. The empty path at a vertex is represented by `base` alone.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path {
    base: VertexRef,
    edges: Vec<EdgeRef>,
}

impl Path {
    /// Builds a path, checking internal composability against `g`.
    pub fn new(g: &Graph, base: VertexRef, edges: Vec<EdgeRef>) -> Result<Self> {
        g.check_vertex(&base)?;
        let mut at = base.clone();
        for e in &edges {
            g.check_edge(e)?;
            let s = g.edge_source(e)?;
            if s != at {
                return Err(LpaError::NonComposable(at.to_string(), s.to_string()));
            }
            at = g.edge_range(e)?;
        }
        Ok(Path { base, edges })
    }

    pub fn vertex(g: &Graph, v: VertexRef) -> Result<Self> {
        Path::new(g, v, Vec::new())
    }

    pub fn single(g: &Graph, e: EdgeRef) -> Result<Self> {
        let base = g.edge_source(&e)?;
        Path::new(g, base, vec![e])
    }

    pub fn base(&self) -> &VertexRef {
        &self.base
    }

    pub fn edges(&self) -> &[EdgeRef] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn source(&self) -> &VertexRef {
        &self.base
    }

    pub fn range(&self, g: &Graph) -> Result<VertexRef> {
        match self.edges.last() {
            None => Ok(self.base.clone()),
            Some(e) => g.edge_range(e),
        }
    }

    /// True when `self` is a prefix of `other` (same base, edge list prefix).
    pub fn is_prefix_of(&self, other: &Path) -> bool {
        self.base == other.base
            && other.edges.len() >= self.edges.len()
            && other.edges[..self.edges.len()] == self.edges[..]
    }

    /// The remainder `q` with `other = self · q`, if `self` is a prefix.
    pub fn strip_prefix(&self, g: &Graph, other: &Path) -> Result<Option<Path>> {
        if !self.is_prefix_of(other) {
            return Ok(None);
        }
        let base = self.range(g)?;
        Ok(Some(Path::new(
            g,
            base,
            other.edges[self.edges.len()..].to_vec(),
        )?))
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.edges.is_empty() {
            write!(f, "{}", self.base)
        } else {
            let parts: Vec<String> = self.edges.iter().map(|e| e.to_string()).collect();
            write!(f, "{}", parts.join("."))
        }
    }
}

/// Concatenation of composable paths.
pub fn compose_paths(g: &Graph, p: &Path, q: &Path) -> Result<Path> {
    let r = p.range(g)?;
    if &r != q.source() {
        return Err(LpaError::NonComposable(
            r.to_string(),
            q.source().to_string(),
        ));
    }
    let mut edges = p.edges().to_vec();
    edges.extend_from_slice(q.edges());
    Path::new(g, p.base().clone(), edges)
}

/// A graph morphism: index-preserving on family members.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GraphMorphism {
    pub vertex_map: BTreeMap<String, String>,
    pub vertex_family_map: BTreeMap<String, String>,
    pub edge_map: BTreeMap<String, String>,
    pub edge_family_map: BTreeMap<String, String>,
}

impl GraphMorphism {
    pub fn identity(g: &Graph) -> Self {
        GraphMorphism {
            vertex_map: g.vertices.iter().map(|v| (v.clone(), v.clone())).collect(),
            vertex_family_map: g
                .vertex_families
                .iter()
                .map(|v| (v.clone(), v.clone()))
                .collect(),
            edge_map: g.edges.keys().map(|e| (e.clone(), e.clone())).collect(),
            edge_family_map: g
                .edge_families
                .keys()
                .map(|e| (e.clone(), e.clone()))
                .collect(),
        }
    }

    pub fn map_vertex(&self, v: &VertexRef) -> Option<VertexRef> {
        match v {
            VertexRef::Concrete(id) => self.vertex_map.get(id).cloned().map(VertexRef::Concrete),
            VertexRef::FamilyMember(id, n) => self
                .vertex_family_map
                .get(id)
                .cloned()
                .map(|f| VertexRef::FamilyMember(f, *n)),
        }
    }

    pub fn map_edge(&self, e: &EdgeRef) -> Option<EdgeRef> {
        match e {
            EdgeRef::Concrete(id) => self.edge_map.get(id).cloned().map(EdgeRef::Concrete),
            EdgeRef::FamilyMember(id, n) => self
                .edge_family_map
                .get(id)
                .cloned()
                .map(|f| EdgeRef::FamilyMember(f, *n)),
        }
    }
}

/// Verdict of a Cuntz-Krieger morphism check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CkVerdict {
    pub ok: bool,
    pub diagnostic: Option<String>,
}

impl CkVerdict {
    fn pass() -> Self {
        CkVerdict {
            ok: true,
            diagnostic: None,
        }
    }

    fn fail(msg: impl Into<String>) -> Self {
        CkVerdict {
            ok: false,
            diagnostic: Some(msg.into()),
        }
    }
}

/// Family members are spot-checked at these indices.
const SAMPLE_INDICES: [u64; 3] = [1, 2, 3];

/// Checks that `m : e -> f` is a CK-morphism: injective on vertices and
/// edges, commuting with source and range, and inducing a bijection on the
/// out-edge sets of every regular vertex of `e`.
pub fn check_ck_morphism(e: &Graph, f: &Graph, m: &GraphMorphism) -> CkVerdict {
    // Totality and target resolution.
    for v in &e.vertices {
        match m.vertex_map.get(v) {
            Some(img) if f.vertices.contains(img) => {}
            Some(img) => return CkVerdict::fail(format!("vertex image `{img}` not in target")),
            None => return CkVerdict::fail(format!("vertex `{v}` unmapped")),
        }
    }
    for v in &e.vertex_families {
        match m.vertex_family_map.get(v) {
            Some(img) if f.vertex_families.contains(img) => {}
            _ => return CkVerdict::fail(format!("vertex family `{v}` unmapped or unresolved")),
        }
    }
    for ed in e.edges.keys() {
        match m.edge_map.get(ed) {
            Some(img) if f.edges.contains_key(img) => {}
            _ => return CkVerdict::fail(format!("edge `{ed}` unmapped or unresolved")),
        }
    }
    for ed in e.edge_families.keys() {
        match m.edge_family_map.get(ed) {
            Some(img) if f.edge_families.contains_key(img) => {}
            _ => return CkVerdict::fail(format!("edge family `{ed}` unmapped or unresolved")),
        }
    }
    // Injectivity.
    let mut seen = BTreeSet::new();
    for img in m.vertex_map.values().chain(m.vertex_family_map.values()) {
        if !seen.insert(img.clone()) {
            return CkVerdict::fail(format!("vertex map not injective at `{img}`"));
        }
    }
    let mut seen = BTreeSet::new();
    for img in m.edge_map.values().chain(m.edge_family_map.values()) {
        if !seen.insert(img.clone()) {
            return CkVerdict::fail(format!("edge map not injective at `{img}`"));
        }
    }
    // Commutation with s, r on concrete edges and sampled family members.
    let mut probe_edges: Vec<EdgeRef> = e.edges.keys().cloned().map(EdgeRef::Concrete).collect();
    for (id, fam) in &e.edge_families {
        for &n in &SAMPLE_INDICES {
            if fam.contains_index(n) {
                probe_edges.push(EdgeRef::FamilyMember(id.clone(), n));
            }
        }
    }
    for edge in &probe_edges {
        let img = match m.map_edge(edge) {
            Some(img) => img,
            None => return CkVerdict::fail(format!("edge `{edge}` unmapped")),
        };
        let (s_ok, r_ok) = match (
            e.edge_source(edge),
            e.edge_range(edge),
            f.edge_source(&img),
            f.edge_range(&img),
        ) {
            (Ok(s), Ok(r), Ok(fs), Ok(fr)) => {
                (m.map_vertex(&s) == Some(fs), m.map_vertex(&r) == Some(fr))
            }
            _ => (false, false),
        };
        if !s_ok {
            return CkVerdict::fail(format!("source not preserved at `{edge}`"));
        }
        if !r_ok {
            return CkVerdict::fail(format!("range not preserved at `{edge}`"));
        }
    }
    // Bijection on out-edge sets at regular vertices.
    let mut probe_vertices: Vec<VertexRef> = e
        .vertices
        .iter()
        .cloned()
        .map(VertexRef::Concrete)
        .collect();
    for id in &e.vertex_families {
        for &n in &SAMPLE_INDICES {
            probe_vertices.push(VertexRef::FamilyMember(id.clone(), n));
        }
    }
    for v in &probe_vertices {
        let class = match e.classify_vertex(v) {
            Ok(c) => c,
            Err(_) => continue,
        };
        if class != VertexClass::Regular {
            continue;
        }
        let out_e = match e.regular_out_edges(v) {
            Ok(Some(out)) => out,
            _ => continue,
        };
        let img_v = match m.map_vertex(v) {
            Some(img) => img,
            None => return CkVerdict::fail(format!("vertex `{v}` unmapped")),
        };
        let out_f = match f.regular_out_edges(&img_v) {
            Ok(Some(out)) => out,
            _ => {
                return CkVerdict::fail(format!(
                    "regular vertex `{v}` maps to non-regular `{img_v}`"
                ))
            }
        };
        let mapped: BTreeSet<EdgeRef> = out_e.iter().filter_map(|ed| m.map_edge(ed)).collect();
        let target: BTreeSet<EdgeRef> = out_f.into_iter().collect();
        if mapped != target {
            return CkVerdict::fail(format!(
                "out-edge sets at `{v}` are not in bijection with those at `{img_v}`"
            ));
        }
    }
    CkVerdict::pass()
}
