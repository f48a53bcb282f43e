//! Graph transformations: out-splitting with its induced generator map,
//! projective-presentation transport, the iterated out-split pipeline, head
//! attachment, stabilization, and the end-to-end corner pipelines.
//!
//! Out-splitting partitions s⁻¹(v) = E₁ ⊔ E₂ (E₁ an explicit finite set,
//! E₂ possibly ω-family-backed), replaces v by v¹, v², and doubles every
//! edge into v. Family members selected into E₁ are materialized as concrete
//! edges and carved out of their family.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{LpaError, Result};
use crate::graph::{
    check_ck_morphism, EdgeFamily, EdgeFamilyKind, EdgeRef, Graph, GraphMorphism, Path,
    VertexClass, VertexRef,
};
use crate::lpa::{self, LpaElement, Monomial};
use crate::monoid::{
    normalize_projective_spec, MonoidElement, MonoidGen, ProjectiveSpec, ProjectiveSummand,
};
use crate::steinberg::{restrict_basis, Bisection};

/// Result of out-splitting one vertex, with enough bookkeeping to transport
/// elements, presentations, and monoid classes across the isomorphism.
#[derive(Debug, Clone)]
pub struct OutSplitResult {
    pub graph: Graph,
    /// The split vertex of the source graph.
    pub split_vertex: VertexRef,
    pub v1: String,
    pub v2: String,
    /// E₁ in source-graph edge references.
    pub part_one: BTreeSet<EdgeRef>,
    /// Ranges of the E₁ edges in the source graph (with multiplicity).
    pub part_one_ranges: Vec<VertexRef>,
    /// Family members of E₁ materialized as concrete edges: member → new id.
    pub materialized: BTreeMap<EdgeRef, String>,
    /// Concrete in-edges doubled as e → (e¹, e²); keys are ids after
    /// materialization.
    pub doubled_edges: BTreeMap<String, (String, String)>,
    /// Constant in-families doubled as F → (F¹, F²).
    pub doubled_families: BTreeMap<String, (String, String)>,
}

impl OutSplitResult {
    /// Image of a source vertex: v ↦ {v¹, v²}, identity elsewhere.
    pub fn image_vertex(&self, v: &VertexRef) -> Vec<VertexRef> {
        if v == &self.split_vertex {
            vec![
                VertexRef::concrete(self.v1.clone()),
                VertexRef::concrete(self.v2.clone()),
            ]
        } else {
            vec![v.clone()]
        }
    }

    /// Image of a source edge: doubled edges map to both copies, materialized
    /// family members to their concrete edge, everything else to itself.
    pub fn image_edge(&self, e: &EdgeRef) -> Vec<EdgeRef> {
        let after_mat: EdgeRef = match self.materialized.get(e) {
            Some(id) => EdgeRef::concrete(id.clone()),
            None => e.clone(),
        };
        match &after_mat {
            EdgeRef::Concrete(id) => match self.doubled_edges.get(id) {
                Some((a, b)) => vec![EdgeRef::concrete(a.clone()), EdgeRef::concrete(b.clone())],
                None => vec![after_mat],
            },
            EdgeRef::FamilyMember(fam, n) => match self.doubled_families.get(fam) {
                Some((a, b)) => vec![
                    EdgeRef::member(a.clone(), *n),
                    EdgeRef::member(b.clone(), *n),
                ],
                None => vec![after_mat],
            },
        }
    }

    /// Preimage of a target edge in the source graph.
    fn preimage_edge(&self, e: &EdgeRef) -> EdgeRef {
        let undoubled: EdgeRef = match e {
            EdgeRef::Concrete(id) => {
                let parent = self
                    .doubled_edges
                    .iter()
                    .find(|(_, (a, b))| a == id || b == id)
                    .map(|(orig, _)| orig.clone());
                EdgeRef::concrete(parent.unwrap_or_else(|| id.clone()))
            }
            EdgeRef::FamilyMember(fam, n) => {
                let parent = self
                    .doubled_families
                    .iter()
                    .find(|(_, (a, b))| a == fam || b == fam)
                    .map(|(orig, _)| orig.clone());
                EdgeRef::member(parent.unwrap_or_else(|| fam.clone()), *n)
            }
        };
        if let EdgeRef::Concrete(id) = &undoubled {
            if let Some((member, _)) = self.materialized.iter().find(|(_, mid)| *mid == id) {
                return member.clone();
            }
        }
        undoubled
    }

    /// Generator image of a vertex as an element of L_K(E_os).
    pub fn map_vertex_elem(&self, v: &VertexRef) -> Result<LpaElement> {
        let mut out = LpaElement::zero();
        for img in self.image_vertex(v) {
            out = out.add(&LpaElement::from_monomial(Monomial::vertex(
                &self.graph,
                img,
            )?));
        }
        Ok(out)
    }

    /// Generator image of a (real) edge as an element of L_K(E_os).
    pub fn map_edge_elem(&self, e: &EdgeRef) -> Result<LpaElement> {
        let mut out = LpaElement::zero();
        for img in self.image_edge(e) {
            out = out.add(&LpaElement::from_monomial(Monomial::path(
                &self.graph,
                Path::single(&self.graph, img)?,
            )?));
        }
        Ok(out)
    }

    fn map_path_elem(&self, p: &Path) -> Result<LpaElement> {
        let mut acc = self.map_vertex_elem(p.base())?;
        for e in p.edges() {
            acc = lpa::mul(&self.graph, &acc, &self.map_edge_elem(e)?)?;
        }
        Ok(acc)
    }

    /// Transport of a whole element along the induced isomorphism.
    pub fn map_element(&self, a: &LpaElement) -> Result<LpaElement> {
        let mut out = LpaElement::zero();
        for (m, c) in a.terms() {
            let p = self.map_path_elem(m.p())?;
            let q = self.map_path_elem(m.q())?;
            let term = lpa::mul(&self.graph, &p, &lpa::star(&q))?;
            out = out.add(&term.scale(c));
        }
        Ok(out)
    }

    /// Pulls a monoid element of M_{E_os} back to M_E:
    /// v¹ ↦ Σ_{e∈E₁} r(e), v² ↦ q_{(v,E₁)}, edges via their preimages.
    pub fn pull_back_monoid(&self, m: &MonoidElement) -> Result<MonoidElement> {
        let mut out = MonoidElement::zero();
        for (gen, n) in m.generators() {
            match gen {
                MonoidGen::Vertex(VertexRef::Concrete(id)) if *id == self.v1 => {
                    for r in &self.part_one_ranges {
                        out.add(MonoidGen::Vertex(r.clone()), n);
                    }
                }
                MonoidGen::Vertex(VertexRef::Concrete(id)) if *id == self.v2 => {
                    out.add(
                        MonoidGen::Q {
                            vertex: self.split_vertex.clone(),
                            edges: self.part_one.clone(),
                        },
                        n,
                    );
                }
                MonoidGen::Vertex(v) => out.add(MonoidGen::Vertex(v.clone()), n),
                MonoidGen::Q { vertex, edges } => {
                    let vertex = if matches!(vertex, VertexRef::Concrete(id) if *id == self.v1 || *id == self.v2)
                    {
                        self.split_vertex.clone()
                    } else {
                        vertex.clone()
                    };
                    let edges = edges.iter().map(|e| self.preimage_edge(e)).collect();
                    out.add(MonoidGen::Q { vertex, edges }, n);
                }
            }
        }
        Ok(out)
    }
}

/// Out-splits `v` along the partition (E₁, s⁻¹(v) ∖ E₁).
pub fn out_split(g: &Graph, v: &VertexRef, part_one: &BTreeSet<EdgeRef>) -> Result<OutSplitResult> {
    let vid = match v {
        VertexRef::Concrete(id) => id.clone(),
        VertexRef::FamilyMember(..) => {
            return Err(LpaError::OutSplit(format!(
                "cannot split family-member vertex {v}"
            )))
        }
    };
    g.check_vertex(v)?;
    let class = g.classify_vertex(v)?;
    if class == VertexClass::Sink {
        return Err(LpaError::OutSplit(format!("{v} is a sink")));
    }
    if part_one.is_empty() {
        return Err(LpaError::OutSplit("E1 must be nonempty".into()));
    }
    for e in part_one {
        g.check_edge(e)?;
        if &g.edge_source(e)? != v {
            return Err(LpaError::OutSplit(format!("{e} does not emit from {v}")));
        }
    }
    if class == VertexClass::Regular {
        let all: BTreeSet<EdgeRef> = g
            .regular_out_edges(v)?
            .expect("regular vertex")
            .into_iter()
            .collect();
        if part_one == &all {
            return Err(LpaError::OutSplit(
                "degenerate split: E1 is all of a finite out-edge set".into(),
            ));
        }
    }
    let part_one_ranges = part_one
        .iter()
        .map(|e| g.edge_range(e))
        .collect::<Result<Vec<_>>>()?;

    let mut out = g.clone();

    // Materialize family members chosen into E₁ as concrete edges.
    let mut materialized = BTreeMap::new();
    for e in part_one {
        if let EdgeRef::FamilyMember(fam, n) = e {
            let id = out.fresh_id(&format!("{fam}{n}"));
            let range = out.edge_range(e)?;
            let family = out
                .edge_families
                .get_mut(fam)
                .expect("family checked above");
            family.excluded.insert(*n);
            out.edges.insert(
                id.clone(),
                crate::graph::ConcreteEdge {
                    source: v.clone(),
                    range,
                },
            );
            materialized.insert(e.clone(), id);
        }
    }
    let part_one_now: BTreeSet<EdgeRef> = part_one
        .iter()
        .map(|e| match materialized.get(e) {
            Some(id) => EdgeRef::concrete(id.clone()),
            None => e.clone(),
        })
        .collect();

    // Split the vertex.
    let v1 = out.fresh_id(&format!("{vid}1"));
    out.vertices.insert(v1.clone());
    let v2 = out.fresh_id(&format!("{vid}2"));
    out.vertices.insert(v2.clone());

    // Reassign sources of outgoing edges by part.
    let edge_ids: Vec<String> = out.edges.keys().cloned().collect();
    for id in &edge_ids {
        if out.edges[id].source == *v {
            let part1 = part_one_now.contains(&EdgeRef::concrete(id.clone()));
            out.edges.get_mut(id).unwrap().source =
                VertexRef::concrete(if part1 { v1.clone() } else { v2.clone() });
        }
    }
    let fam_ids: Vec<String> = out.edge_families.keys().cloned().collect();
    for id in &fam_ids {
        let fam = &out.edge_families[id];
        let source_is_v = match &fam.kind {
            EdgeFamilyKind::Constant { source, .. } | EdgeFamilyKind::Diagonal { source, .. } => {
                *source == vid
            }
            EdgeFamilyKind::Chain { .. } => false,
        };
        if source_is_v {
            // Remaining members all lie in E₂.
            let fam = out.edge_families.get_mut(id).unwrap();
            match &mut fam.kind {
                EdgeFamilyKind::Constant { source, .. }
                | EdgeFamilyKind::Diagonal { source, .. } => *source = v2.clone(),
                EdgeFamilyKind::Chain { .. } => unreachable!(),
            }
        }
    }

    // Double edges into v.
    let mut doubled_edges = BTreeMap::new();
    for id in &edge_ids {
        let Some(edge) = out.edges.get(id) else {
            continue;
        };
        if edge.range != *v {
            continue;
        }
        let source = edge.source.clone();
        out.edges.remove(id);
        let a = out.fresh_id(&format!("{id}1"));
        out.edges.insert(
            a.clone(),
            crate::graph::ConcreteEdge {
                source: source.clone(),
                range: VertexRef::concrete(v1.clone()),
            },
        );
        let b = out.fresh_id(&format!("{id}2"));
        out.edges.insert(
            b.clone(),
            crate::graph::ConcreteEdge {
                source,
                range: VertexRef::concrete(v2.clone()),
            },
        );
        doubled_edges.insert(id.clone(), (a, b));
    }
    // Edges added during materialization can themselves point at v.
    let new_ids: Vec<String> = out
        .edges
        .iter()
        .filter(|(id, e)| e.range == *v && !edge_ids.contains(id))
        .map(|(id, _)| id.clone())
        .collect();
    for id in new_ids {
        let edge = out.edges.remove(&id).unwrap();
        let a = out.fresh_id(&format!("{id}1"));
        out.edges.insert(
            a.clone(),
            crate::graph::ConcreteEdge {
                source: edge.source.clone(),
                range: VertexRef::concrete(v1.clone()),
            },
        );
        let b = out.fresh_id(&format!("{id}2"));
        out.edges.insert(
            b.clone(),
            crate::graph::ConcreteEdge {
                source: edge.source,
                range: VertexRef::concrete(v2.clone()),
            },
        );
        doubled_edges.insert(id, (a, b));
    }

    // Double Constant families into v.
    let mut doubled_families = BTreeMap::new();
    for id in &fam_ids {
        let Some(fam) = out.edge_families.get(id) else {
            continue;
        };
        let ranges_v = matches!(&fam.kind, EdgeFamilyKind::Constant { range, .. } if range == v);
        if !ranges_v {
            match &fam.kind {
                EdgeFamilyKind::Diagonal { .. } | EdgeFamilyKind::Constant { .. } => {}
                EdgeFamilyKind::Chain { base, .. } if base == v => {
                    return Err(LpaError::OutSplit(format!(
                        "{v} is the base of chain family {id}"
                    )))
                }
                EdgeFamilyKind::Chain { .. } => {}
            }
            continue;
        }
        let fam = out.edge_families.remove(id).unwrap();
        let (source, excluded) = match &fam.kind {
            EdgeFamilyKind::Constant { source, .. } => (source.clone(), fam.excluded.clone()),
            _ => unreachable!(),
        };
        let a = out.fresh_id(&format!("{id}1"));
        out.edge_families.insert(
            a.clone(),
            EdgeFamily {
                kind: EdgeFamilyKind::Constant {
                    source: source.clone(),
                    range: VertexRef::concrete(v1.clone()),
                },
                excluded: excluded.clone(),
            },
        );
        let b = out.fresh_id(&format!("{id}2"));
        out.edge_families.insert(
            b.clone(),
            EdgeFamily {
                kind: EdgeFamilyKind::Constant {
                    source,
                    range: VertexRef::concrete(v2.clone()),
                },
                excluded,
            },
        );
        doubled_families.insert(id.clone(), (a, b));
    }

    out.vertices.remove(&vid);
    out.validate()?;

    Ok(OutSplitResult {
        graph: out,
        split_vertex: v.clone(),
        v1,
        v2,
        part_one: part_one.clone(),
        part_one_ranges,
        materialized,
        doubled_edges,
        doubled_families,
    })
}

/// Transports one presentation summand across an out-split performed with
/// E₁ equal to the summand's T-set at the split vertex.
pub fn transform_summand(
    g_src: &Graph,
    s: &ProjectiveSummand,
    r: &OutSplitResult,
) -> Result<Vec<ProjectiveSummand>> {
    if s.vertex == r.split_vertex {
        if s.edges.is_empty() {
            return Ok(vec![
                ProjectiveSummand {
                    vertex: VertexRef::concrete(r.v1.clone()),
                    edges: BTreeSet::new(),
                    mult: s.mult,
                },
                ProjectiveSummand {
                    vertex: VertexRef::concrete(r.v2.clone()),
                    edges: BTreeSet::new(),
                    mult: s.mult,
                },
            ]);
        }
        if s.edges != r.part_one {
            return Err(LpaError::OutSplit(format!(
                "summand at {} has T-set different from the split's E1",
                s.vertex
            )));
        }
        return Ok(vec![ProjectiveSummand {
            vertex: VertexRef::concrete(r.v2.clone()),
            edges: BTreeSet::new(),
            mult: s.mult,
        }]);
    }
    let mut edges = BTreeSet::new();
    for e in &s.edges {
        g_src.check_edge(e)?;
        edges.extend(r.image_edge(e));
    }
    Ok(vec![ProjectiveSummand {
        vertex: s.vertex.clone(),
        edges,
        mult: s.mult,
    }])
}

/// Result of the iterated out-split pipeline: all summands reduced to plain
/// vertex summands.
#[derive(Debug, Clone)]
pub struct CateisoResult {
    pub graph: Graph,
    pub mults: BTreeMap<VertexRef, u64>,
    pub splits: Vec<OutSplitResult>,
    pub trace: Vec<String>,
}

impl CateisoResult {
    /// Pulls a monoid element of the final graph back to the source graph.
    pub fn pull_back_monoid(&self, m: &MonoidElement) -> Result<MonoidElement> {
        let mut cur = m.clone();
        for split in self.splits.iter().rev() {
            cur = split.pull_back_monoid(&cur)?;
        }
        Ok(cur)
    }

    pub fn mults_monoid(&self) -> MonoidElement {
        let mut out = MonoidElement::zero();
        for (v, n) in &self.mults {
            out.add(MonoidGen::Vertex(v.clone()), *n);
        }
        out
    }
}

/// Iterates out-splits (ascending vertex order) until every summand of the
/// transported presentation is a plain vertex summand. The input must be
/// normalized (`normalize_projective_spec`).
pub fn cateiso_pipeline(g: &Graph, s: &ProjectiveSpec) -> Result<CateisoResult> {
    let mut graph = g.clone();
    let mut spec: ProjectiveSpec = s.clone();
    let mut splits = Vec::new();
    let mut trace = Vec::new();
    loop {
        crate::monoid::validate_spec(&graph, &spec)?;
        let next = spec
            .iter()
            .filter(|x| !x.edges.is_empty())
            .map(|x| x.vertex.clone())
            .min();
        let Some(v) = next else { break };
        let part_one: BTreeSet<EdgeRef> = spec
            .iter()
            .filter(|x| x.vertex == v && !x.edges.is_empty())
            .flat_map(|x| x.edges.iter().cloned())
            .collect();
        let split = out_split(&graph, &v, &part_one)?;
        trace.push(format!(
            "out-split {v} into {}, {} with E1 = {{{}}}; generators {v} -> {} + {}, doubled edges {}",
            split.v1,
            split.v2,
            part_one
                .iter()
                .map(|e| e.to_string())
                .collect::<Vec<_>>()
                .join(","),
            split.v1,
            split.v2,
            split
                .doubled_edges
                .iter()
                .map(|(e, (a, b))| format!("{e} -> {a} + {b}"))
                .collect::<Vec<_>>()
                .join(", "),
        ));
        let mut new_spec = Vec::new();
        for summand in &spec {
            new_spec.extend(transform_summand(&graph, summand, &split)?);
        }
        graph = split.graph.clone();
        spec = new_spec;
        splits.push(split);
    }
    let mut mults: BTreeMap<VertexRef, u64> = BTreeMap::new();
    for summand in &spec {
        *mults.entry(summand.vertex.clone()).or_insert(0) += summand.mult;
    }
    Ok(CateisoResult {
        graph,
        mults,
        splits,
        trace,
    })
}

/// Result of finite head attachment.
#[derive(Debug, Clone)]
pub struct HeadsResult {
    pub graph: Graph,
    /// H, ordered per base vertex as v^{n-1}, …, v^1, v.
    pub h: Vec<VertexRef>,
    /// p_v^y: the head path of length y from v^y down to v (y = 0 gives the
    /// empty path at v).
    pub head_paths: BTreeMap<(VertexRef, u64), Path>,
    pub trace: Vec<String>,
}

/// Attaches a finite head of length n−1 to every vertex of multiplicity n.
pub fn attach_heads(f: &Graph, mults: &BTreeMap<VertexRef, u64>) -> Result<HeadsResult> {
    let mut graph = f.clone();
    let mut h = Vec::new();
    let mut head_paths = BTreeMap::new();
    let mut trace = Vec::new();
    for (v, &n) in mults {
        if n == 0 {
            return Err(LpaError::Pipeline(format!("zero multiplicity at {v}")));
        }
        graph.check_vertex(v)?;
        head_paths.insert((v.clone(), 0), Path::vertex(&graph, v.clone())?);
        if n == 1 {
            h.push(v.clone());
            continue;
        }
        let vid = match v {
            VertexRef::Concrete(id) => id.clone(),
            VertexRef::FamilyMember(..) => {
                return Err(LpaError::Unsupported(format!(
                    "cannot attach a finite head to family-member vertex {v}"
                )))
            }
        };
        // Chain v_{n-1} -> ... -> v_1 -> v.
        let mut chain_vertices = Vec::new();
        let mut below = v.clone();
        let mut edges_down: Vec<EdgeRef> = Vec::new();
        for k in 1..n {
            let vk = graph.fresh_id(&format!("{vid}_{k}"));
            graph.add_vertex(vk.clone())?;
            let ek = graph.fresh_id(&format!("{vid}_h{k}"));
            graph.add_edge(ek.clone(), VertexRef::concrete(vk.clone()), below.clone())?;
            trace.push(format!("head edge {ek}: {vk} -> {below}"));
            edges_down.insert(0, EdgeRef::concrete(ek));
            below = VertexRef::concrete(vk.clone());
            chain_vertices.push(VertexRef::concrete(vk.clone()));
            // p_v^k runs from v^k down to v.
            head_paths.insert(
                (v.clone(), k),
                Path::new(&graph, below.clone(), edges_down.clone())?,
            );
        }
        for vk in chain_vertices.into_iter().rev() {
            h.push(vk);
        }
        h.push(v.clone());
    }
    let inclusion = GraphMorphism::identity(f);
    let verdict = check_ck_morphism(f, &graph, &inclusion);
    if !verdict.ok {
        return Err(LpaError::Pipeline(format!(
            "head attachment broke the CK-inclusion: {}",
            verdict.diagnostic.unwrap_or_default()
        )));
    }
    Ok(HeadsResult {
        graph,
        h,
        head_paths,
        trace,
    })
}

/// φ_{(i,y),(j,z)}(r) = p_i^y · r · (p_j^z)* for r in the (v_i, v_j) corner.
pub fn phi_conjugate(
    heads: &HeadsResult,
    i: &VertexRef,
    y: u64,
    j: &VertexRef,
    z: u64,
    r: &LpaElement,
) -> Result<LpaElement> {
    let g = &heads.graph;
    for (m, _) in r.terms() {
        if m.p().source() != i || m.q().source() != j {
            return Err(LpaError::InvalidMonomial(format!(
                "{m} is not in the ({i}, {j}) corner"
            )));
        }
    }
    let py = heads
        .head_paths
        .get(&(i.clone(), y))
        .ok_or_else(|| LpaError::Pipeline(format!("no head path of length {y} at {i}")))?;
    let pz = heads
        .head_paths
        .get(&(j.clone(), z))
        .ok_or_else(|| LpaError::Pipeline(format!("no head path of length {z} at {j}")))?;
    let left = LpaElement::from_monomial(Monomial::path(g, py.clone())?);
    let right = LpaElement::from_monomial(Monomial::ghost(g, pz.clone())?);
    lpa::mul(g, &lpa::mul(g, &left, r)?, &right)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PipelineKind {
    End,
    CStar,
}

/// Output of an end-to-end pipeline run.
#[derive(Debug, Clone)]
pub struct PipelineReport {
    pub kind: PipelineKind,
    pub final_graph: Graph,
    pub h: Vec<VertexRef>,
    /// σ×σ block labels "row L col" over H.
    pub matrix_shape: Vec<Vec<String>>,
    pub sample_basis: Vec<Bisection>,
    pub trace: Vec<String>,
}

fn matrix_shape(h: &[VertexRef]) -> Vec<Vec<String>> {
    h.iter()
        .map(|row| h.iter().map(|col| format!("{row} L {col}")).collect())
        .collect()
}

/// Endomorphism-ring pipeline: normalize, out-split, attach finite heads.
pub fn end_pipeline(g: &Graph, s: &ProjectiveSpec) -> Result<PipelineReport> {
    let spec = normalize_projective_spec(g, s)?;
    let cate = cateiso_pipeline(g, &spec)?;
    let heads = attach_heads(&cate.graph, &cate.mults)?;
    let mut trace = vec![format!(
        "normalized presentation: {}",
        spec.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(" + ")
    )];
    trace.extend(cate.trace.clone());
    trace.push(format!(
        "multiplicities: {}",
        cate.mults
            .iter()
            .map(|(v, n)| format!("{v}:{n}"))
            .collect::<Vec<_>>()
            .join(", ")
    ));
    trace.extend(heads.trace.clone());
    let h_set: BTreeSet<VertexRef> = heads.h.iter().cloned().collect();
    let sample_basis = restrict_basis(&heads.graph, &h_set, 2, 2)?;
    Ok(PipelineReport {
        kind: PipelineKind::End,
        final_graph: heads.graph.clone(),
        h: heads.h.clone(),
        matrix_shape: matrix_shape(&heads.h),
        sample_basis,
        trace,
    })
}

/// Result of stabilization: the graph SF with an ω-head at every vertex and
/// the finite H of selected head members.
#[derive(Debug, Clone)]
pub struct StabilizeResult {
    pub graph: Graph,
    pub h: Vec<VertexRef>,
    /// Head vertex-family per concrete vertex.
    pub head_families: BTreeMap<String, String>,
    pub trace: Vec<String>,
}

/// Attaches an infinite head … → v_2 → v_1 → v to every vertex. Heads on
/// concrete vertices are chain-encoded families; vertex families are marked
/// as stabilized wholesale (their heads feed members without changing any
/// outgoing structure).
pub fn stabilize(f: &Graph, mults: &BTreeMap<VertexRef, u64>) -> Result<StabilizeResult> {
    let mut graph = f.clone();
    let mut head_families = BTreeMap::new();
    let mut trace = Vec::new();
    let concrete: Vec<String> = graph.vertices.iter().cloned().collect();
    for vid in &concrete {
        let fam = graph.fresh_id(&format!("{vid}_h"));
        graph.add_vertex_family(fam.clone())?;
        let chain = graph.fresh_id(&format!("{vid}_he"));
        graph.add_edge_family(
            chain.clone(),
            EdgeFamily::new(EdgeFamilyKind::Chain {
                family: fam.clone(),
                base: VertexRef::concrete(vid.clone()),
            }),
        )?;
        trace.push(format!("infinite head {fam}/{chain} attached at {vid}"));
        head_families.insert(vid.clone(), fam);
    }
    let families: Vec<String> = graph.vertex_families.iter().cloned().collect();
    for fam in families {
        if head_families.values().any(|h| *h == fam) {
            continue;
        }
        graph.stabilized_families.insert(fam.clone());
        trace.push(format!(
            "infinite heads attached at every member of family {fam}"
        ));
    }
    let mut h = Vec::new();
    for (v, &n) in mults {
        if n == 0 {
            return Err(LpaError::Pipeline(format!("zero multiplicity at {v}")));
        }
        graph.check_vertex(v)?;
        if n > 1 {
            let vid = match v {
                VertexRef::Concrete(id) => id.clone(),
                VertexRef::FamilyMember(..) => {
                    return Err(LpaError::Unsupported(format!(
                        "multiplicity above one at family-member vertex {v}"
                    )))
                }
            };
            let fam = &head_families[&vid];
            for k in 1..n {
                h.push(VertexRef::member(fam.clone(), k));
            }
        }
        h.push(v.clone());
    }
    graph.validate()?;
    Ok(StabilizeResult {
        graph,
        h,
        head_families,
        trace,
    })
}

/// Graph-level C*-corner pipeline: normalize, out-split, stabilize.
pub fn cstar_pipeline(g: &Graph, s: &ProjectiveSpec) -> Result<PipelineReport> {
    let spec = normalize_projective_spec(g, s)?;
    let cate = cateiso_pipeline(g, &spec)?;
    let stab = stabilize(&cate.graph, &cate.mults)?;
    let mut trace = vec![format!(
        "normalized presentation: {}",
        spec.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(" + ")
    )];
    for split in &cate.splits {
        trace.push(format!(
            "generator images: p_{} -> p_{} + p_{}{}",
            split.split_vertex,
            split.v1,
            split.v2,
            split
                .doubled_edges
                .iter()
                .map(|(e, (a, b))| format!("; s_{e} -> s_{a} + s_{b}"))
                .collect::<Vec<_>>()
                .join("")
        ));
    }
    trace.extend(cate.trace.clone());
    trace.extend(stab.trace.clone());
    let h_set: BTreeSet<VertexRef> = stab.h.iter().cloned().collect();
    let sample_basis = restrict_basis(&stab.graph, &h_set, 1, 2)?;
    Ok(PipelineReport {
        kind: PipelineKind::CStar,
        final_graph: stab.graph.clone(),
        h: stab.h.clone(),
        matrix_shape: matrix_shape(&stab.h),
        sample_basis,
        trace,
    })
}
