//! The graph monoid M_E = T/∼_E.
//!
//! T is the free abelian monoid on the vertices together with generators
//! q_{(v,Z)} for infinite emitters v and nonempty finite Z ⊆ s⁻¹(v), modulo
//! (1) v = Σ_{e∈s⁻¹(v)} r(e) at regular v,
//! (2) v = Σ_{e∈Z} r(e) + q_Z at infinite emitters,
//! (3) q_Z = Σ_{e∈W∖Z} r(e) + q_W for Z ⊆ W.
//! Equivalence is semi-decided by a bounded breadth-first search for a common
//! reduct; relation (2)/(3) instances are drawn from a finite caller-supplied
//! universe of edges per infinite emitter, so a `Yes` always carries a
//! replayable witness and `Unknown` is the only other verdict.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{LpaError, Result};
use crate::graph::{EdgeRef, Graph, VertexClass, VertexRef};

/// Generator of the free monoid T.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum MonoidGen {
    Vertex(VertexRef),
    /// q_{(v,Z)} with Z a nonempty explicit subset of s⁻¹(v).
    Q {
        vertex: VertexRef,
        edges: BTreeSet<EdgeRef>,
    },
}

impl fmt::Display for MonoidGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MonoidGen::Vertex(v) => write!(f, "{v}"),
            MonoidGen::Q { vertex, edges } => {
                let items: Vec<String> = edges.iter().map(|e| e.to_string()).collect();
                write!(f, "q({vertex};{{{}}})", items.join(","))
            }
        }
    }
}

/// A finite multiset of generators (an element of T, written additively).
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct MonoidElement {
    counts: BTreeMap<MonoidGen, u64>,
}

impl MonoidElement {
    pub fn zero() -> Self {
        MonoidElement::default()
    }

    pub fn vertex(v: VertexRef) -> Self {
        let mut m = MonoidElement::zero();
        m.add(MonoidGen::Vertex(v), 1);
        m
    }

    pub fn add(&mut self, g: MonoidGen, n: u64) {
        if n == 0 {
            return;
        }
        *self.counts.entry(g).or_insert(0) += n;
    }

    /// Removes one occurrence; false when absent.
    pub fn remove_one(&mut self, g: &MonoidGen) -> bool {
        match self.counts.get_mut(g) {
            Some(n) if *n > 1 => {
                *n -= 1;
                true
            }
            Some(_) => {
                self.counts.remove(g);
                true
            }
            None => false,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn generators(&self) -> impl Iterator<Item = (&MonoidGen, u64)> {
        self.counts.iter().map(|(g, n)| (g, *n))
    }

    pub fn plus(&self, other: &MonoidElement) -> MonoidElement {
        let mut out = self.clone();
        for (g, n) in other.generators() {
            out.add(g.clone(), n);
        }
        out
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }
}

impl fmt::Display for MonoidElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.counts.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (g, n) in &self.counts {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if *n == 1 {
                write!(f, "{g}")?;
            } else {
                write!(f, "{n}*{g}")?;
            }
        }
        Ok(())
    }
}

/// Finite edge universe per infinite emitter, bounding relations (2)/(3).
pub type Universe = BTreeMap<VertexRef, BTreeSet<EdgeRef>>;

/// Collects a universe from the q-generators mentioned in the inputs.
pub fn assemble_universe(xs: &[&MonoidElement]) -> Universe {
    let mut u = Universe::new();
    for x in xs {
        for (g, _) in x.generators() {
            if let MonoidGen::Q { vertex, edges } = g {
                u.entry(vertex.clone())
                    .or_default()
                    .extend(edges.iter().cloned());
            }
        }
    }
    u
}

fn check_in_universe(g: &Graph, x: &MonoidElement, universe: &Universe) -> Result<()> {
    for (gen, _) in x.generators() {
        if let MonoidGen::Q { vertex, edges } = gen {
            if g.classify_vertex(vertex)? != VertexClass::InfiniteEmitter {
                return Err(LpaError::InvalidSpec(format!(
                    "q-generator at non-infinite-emitter {vertex}"
                )));
            }
            let have = universe.get(vertex);
            if !edges.iter().all(|e| have.is_some_and(|u| u.contains(e))) {
                return Err(LpaError::OutsideUniverse(gen.to_string()));
            }
        }
    }
    Ok(())
}

fn nonempty_subsets(edges: &BTreeSet<EdgeRef>) -> Vec<BTreeSet<EdgeRef>> {
    let items: Vec<&EdgeRef> = edges.iter().collect();
    let mut out = Vec::new();
    for mask in 1u64..(1u64 << items.len()) {
        let mut set = BTreeSet::new();
        for (i, e) in items.iter().enumerate() {
            if mask & (1 << i) != 0 {
                set.insert((*e).clone());
            }
        }
        out.push(set);
    }
    out
}

/// All one-step successors of `x` under relations (1)–(3).
pub fn reduce_once(
    g: &Graph,
    x: &MonoidElement,
    universe: &Universe,
) -> Result<BTreeSet<MonoidElement>> {
    check_in_universe(g, x, universe)?;
    let mut out = BTreeSet::new();
    for (gen, _) in x.generators() {
        match gen {
            MonoidGen::Vertex(v) => match g.classify_vertex(v)? {
                VertexClass::Regular => {
                    let edges = g
                        .regular_out_edges(v)?
                        .expect("regular vertex has finite out-edges");
                    let mut succ = x.clone();
                    succ.remove_one(gen);
                    for e in &edges {
                        succ.add(MonoidGen::Vertex(g.edge_range(e)?), 1);
                    }
                    out.insert(succ);
                }
                VertexClass::InfiniteEmitter => {
                    let empty = BTreeSet::new();
                    let u = universe.get(v).unwrap_or(&empty);
                    for z in nonempty_subsets(u) {
                        let mut succ = x.clone();
                        succ.remove_one(gen);
                        for e in &z {
                            succ.add(MonoidGen::Vertex(g.edge_range(e)?), 1);
                        }
                        succ.add(
                            MonoidGen::Q {
                                vertex: v.clone(),
                                edges: z,
                            },
                            1,
                        );
                        out.insert(succ);
                    }
                }
                VertexClass::Sink => {}
            },
            MonoidGen::Q { vertex, edges } => {
                let empty = BTreeSet::new();
                let u = universe.get(vertex).unwrap_or(&empty);
                let rest: BTreeSet<EdgeRef> = u.difference(edges).cloned().collect();
                for extra in nonempty_subsets(&rest) {
                    let mut succ = x.clone();
                    succ.remove_one(gen);
                    let mut w = edges.clone();
                    for e in &extra {
                        succ.add(MonoidGen::Vertex(g.edge_range(e)?), 1);
                        w.insert(e.clone());
                    }
                    succ.add(
                        MonoidGen::Q {
                            vertex: vertex.clone(),
                            edges: w,
                        },
                        1,
                    );
                    out.insert(succ);
                }
            }
        }
    }
    Ok(out)
}

/// A replayable pair of reduction chains meeting at a common reduct.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    /// Chain x = s₀, s₁, …, s_k = common (each step one relation instance).
    pub from_x: Vec<MonoidElement>,
    pub from_y: Vec<MonoidElement>,
}

impl Witness {
    pub fn common(&self) -> &MonoidElement {
        self.from_x.last().expect("chains are nonempty")
    }
}

/// Verdict of the bounded equivalence search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Equivalence {
    Yes(Witness),
    Unknown,
}

impl Equivalence {
    pub fn is_yes(&self) -> bool {
        matches!(self, Equivalence::Yes(_))
    }
}

type ParentMap = BTreeMap<MonoidElement, Option<MonoidElement>>;

fn chain_to(parents: &ParentMap, end: &MonoidElement) -> Vec<MonoidElement> {
    let mut chain = vec![end.clone()];
    let mut cur = end.clone();
    while let Some(Some(parent)) = parents.get(&cur) {
        chain.push(parent.clone());
        cur = parent.clone();
    }
    chain.reverse();
    chain
}

fn meeting(px: &ParentMap, py: &ParentMap) -> Option<MonoidElement> {
    px.keys().find(|k| py.contains_key(*k)).cloned()
}

/// Bounded two-sided search for a common reduct. `Yes` is always sound (the
/// witness replays under `reduce_once`); `Unknown` means no common reduct was
/// found within `depth` reduction levels on each side.
pub fn equivalent(
    g: &Graph,
    x: &MonoidElement,
    y: &MonoidElement,
    universe: &Universe,
    depth: u32,
) -> Result<Equivalence> {
    let mut px: ParentMap = BTreeMap::new();
    let mut py: ParentMap = BTreeMap::new();
    px.insert(x.clone(), None);
    py.insert(y.clone(), None);
    let mut fx = vec![x.clone()];
    let mut fy = vec![y.clone()];
    for _ in 0..=depth {
        if let Some(common) = meeting(&px, &py) {
            return Ok(Equivalence::Yes(Witness {
                from_x: chain_to(&px, &common),
                from_y: chain_to(&py, &common),
            }));
        }
        if fx.is_empty() && fy.is_empty() {
            break;
        }
        let mut nfx = Vec::new();
        for s in &fx {
            for succ in reduce_once(g, s, universe)? {
                if !px.contains_key(&succ) {
                    px.insert(succ.clone(), Some(s.clone()));
                    nfx.push(succ);
                }
            }
        }
        let mut nfy = Vec::new();
        for s in &fy {
            for succ in reduce_once(g, s, universe)? {
                if !py.contains_key(&succ) {
                    py.insert(succ.clone(), Some(s.clone()));
                    nfy.push(succ);
                }
            }
        }
        fx = nfx;
        fy = nfy;
    }
    if let Some(common) = meeting(&px, &py) {
        return Ok(Equivalence::Yes(Witness {
            from_x: chain_to(&px, &common),
            from_y: chain_to(&py, &common),
        }));
    }
    Ok(Equivalence::Unknown)
}

/// Replays a witness: both chains must start at the claimed endpoints, end at
/// the same element, and advance by single `reduce_once` steps.
pub fn audit_witness(
    g: &Graph,
    x: &MonoidElement,
    y: &MonoidElement,
    universe: &Universe,
    w: &Witness,
) -> Result<bool> {
    if w.from_x.first() != Some(x) || w.from_y.first() != Some(y) {
        return Ok(false);
    }
    if w.from_x.last() != w.from_y.last() {
        return Ok(false);
    }
    for chain in [&w.from_x, &w.from_y] {
        for pair in chain.windows(2) {
            if !reduce_once(g, &pair[0], universe)?.contains(&pair[1]) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// One summand n·L_K(E)(v − Σ_{e∈T} ee*) of a projective-module presentation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ProjectiveSummand {
    pub vertex: VertexRef,
    pub edges: BTreeSet<EdgeRef>,
    pub mult: u64,
}

impl fmt::Display for ProjectiveSummand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.edges.iter().map(|e| e.to_string()).collect();
        write!(
            f,
            "{} ({}; {{{}}})",
            self.mult,
            self.vertex,
            items.join(",")
        )
    }
}

pub type ProjectiveSpec = Vec<ProjectiveSummand>;

/// Checks that every T-set lives at an infinite emitter inside s⁻¹(v).
pub fn validate_spec(g: &Graph, s: &ProjectiveSpec) -> Result<()> {
    for summand in s {
        g.check_vertex(&summand.vertex)?;
        if summand.mult == 0 {
            return Err(LpaError::InvalidSpec(format!(
                "zero multiplicity at {}",
                summand.vertex
            )));
        }
        if summand.edges.is_empty() {
            continue;
        }
        if g.classify_vertex(&summand.vertex)? != VertexClass::InfiniteEmitter {
            return Err(LpaError::InvalidSpec(format!(
                "nonempty T-set at non-infinite-emitter {}",
                summand.vertex
            )));
        }
        for e in &summand.edges {
            g.check_edge(e)?;
            if g.edge_source(e)? != summand.vertex {
                return Err(LpaError::InvalidSpec(format!(
                    "edge {e} in T-set does not emit from {}",
                    summand.vertex
                )));
            }
        }
    }
    Ok(())
}

/// Rewrites a presentation into the aligned form: per infinite emitter v the
/// union T_v of its T-sets is used everywhere, each upgraded summand paying
/// with one vertex summand r(e) per edge e ∈ T_v ∖ T; equal summands merge.
pub fn normalize_projective_spec(g: &Graph, s: &ProjectiveSpec) -> Result<ProjectiveSpec> {
    validate_spec(g, s)?;
    let mut t_union: BTreeMap<VertexRef, BTreeSet<EdgeRef>> = BTreeMap::new();
    for summand in s {
        if !summand.edges.is_empty() {
            t_union
                .entry(summand.vertex.clone())
                .or_default()
                .extend(summand.edges.iter().cloned());
        }
    }
    let mut merged: BTreeMap<(VertexRef, BTreeSet<EdgeRef>), u64> = BTreeMap::new();
    let mut emit = |v: VertexRef, t: BTreeSet<EdgeRef>, n: u64| {
        *merged.entry((v, t)).or_insert(0) += n;
    };
    for summand in s {
        if summand.edges.is_empty() {
            emit(summand.vertex.clone(), BTreeSet::new(), summand.mult);
            continue;
        }
        let tv = &t_union[&summand.vertex];
        emit(summand.vertex.clone(), tv.clone(), summand.mult);
        for e in tv.difference(&summand.edges) {
            emit(g.edge_range(e)?, BTreeSet::new(), summand.mult);
        }
    }
    Ok(merged
        .into_iter()
        .map(|((vertex, edges), mult)| ProjectiveSummand {
            vertex,
            edges,
            mult,
        })
        .collect())
}

/// The monoid class of a presentation: (v,T,n) ↦ n·q_{(v,T)} (n·v if T = ∅).
pub fn spec_to_monoid(s: &ProjectiveSpec) -> MonoidElement {
    let mut m = MonoidElement::zero();
    for summand in s {
        let gen = if summand.edges.is_empty() {
            MonoidGen::Vertex(summand.vertex.clone())
        } else {
            MonoidGen::Q {
                vertex: summand.vertex.clone(),
                edges: summand.edges.clone(),
            }
        };
        m.add(gen, summand.mult);
    }
    m
}
