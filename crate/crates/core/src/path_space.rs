//! Cylinder-set calculus on the path space E* ∪ E^∞ and the boundary path
//! space X_E.
//!
//! Infinite paths are represented by their eventually periodic (lasso)
//! points, canonicalized to a primitive cycle with a minimal prefix, so point
//! equality is structural equality. Basic sets ⋂C(α) ∖ ⋃C(β) normalize into
//! finitely many C(α, G) with G a set of single edges out of r(α).

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{LpaError, Result};
use crate::graph::{compose_paths, EdgeRef, Graph, Path, VertexClass, VertexRef};

/// A point of X_E: a finite path ending at a sink or infinite emitter, or an
/// eventually periodic infinite path `prefix·cycle·cycle·…`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum BoundaryPoint {
    Finite(Path),
    Lasso { prefix: Path, cycle: Path },
}

/// True iff the finite path is a boundary point (range a sink or infinite
/// emitter).
pub fn in_xe(g: &Graph, p: &Path) -> Result<bool> {
    Ok(matches!(
        g.classify_vertex(&p.range(g)?)?,
        VertexClass::Sink | VertexClass::InfiniteEmitter
    ))
}

/// The shortest period of the cycle's edge word.
fn primitive_cycle(g: &Graph, cycle: &Path) -> Result<Path> {
    let edges = cycle.edges();
    let n = edges.len();
    for d in 1..n {
        if !n.is_multiple_of(d) {
            continue;
        }
        if (d..n).all(|i| edges[i] == edges[i - d]) {
            return Path::new(g, cycle.base().clone(), edges[..d].to_vec());
        }
    }
    Ok(cycle.clone())
}

impl BoundaryPoint {
    pub fn finite(g: &Graph, p: Path) -> Result<Self> {
        if !in_xe(g, &p)? {
            return Err(LpaError::InvalidPath(format!(
                "{p} does not end at a sink or infinite emitter"
            )));
        }
        Ok(BoundaryPoint::Finite(p))
    }

    /// Builds `prefix·cycle^∞` in canonical form: the cycle is primitive and
    /// the prefix does not end with the cycle's closing edge.
    pub fn lasso(g: &Graph, prefix: Path, cycle: Path) -> Result<Self> {
        if cycle.is_empty() {
            return Err(LpaError::InvalidPath("empty lasso cycle".into()));
        }
        let rc = cycle.range(g)?;
        if &rc != cycle.source() {
            return Err(LpaError::InvalidPath(format!("{cycle} is not a cycle")));
        }
        if &prefix.range(g)? != cycle.source() {
            return Err(LpaError::NonComposable(
                prefix.range(g)?.to_string(),
                cycle.source().to_string(),
            ));
        }
        let mut cycle = primitive_cycle(g, &cycle)?;
        let mut prefix = prefix;
        // Shift the period left while the prefix ends with the closing edge.
        while let (Some(last_p), Some(last_c)) = (prefix.edges().last(), cycle.edges().last()) {
            if last_p != last_c {
                break;
            }
            let pe = prefix.edges();
            prefix = Path::new(g, prefix.base().clone(), pe[..pe.len() - 1].to_vec())?;
            let ce = cycle.edges();
            let mut rotated = vec![ce[ce.len() - 1].clone()];
            rotated.extend_from_slice(&ce[..ce.len() - 1]);
            let base = g.edge_source(&rotated[0])?;
            cycle = Path::new(g, base, rotated)?;
        }
        Ok(BoundaryPoint::Lasso { prefix, cycle })
    }

    pub fn source(&self) -> &VertexRef {
        match self {
            BoundaryPoint::Finite(p) => p.source(),
            BoundaryPoint::Lasso { prefix, .. } => prefix.source(),
        }
    }

    /// The `i`-th edge (0-based); `None` past the end of a finite point.
    pub fn edge_at(&self, i: usize) -> Option<&EdgeRef> {
        match self {
            BoundaryPoint::Finite(p) => p.edges().get(i),
            BoundaryPoint::Lasso { prefix, cycle } => {
                if i < prefix.len() {
                    prefix.edges().get(i)
                } else {
                    cycle.edges().get((i - prefix.len()) % cycle.len())
                }
            }
        }
    }

    /// The remaining point after removing `alpha` from the front, when the
    /// point extends `alpha`.
    pub fn strip_prefix(&self, g: &Graph, alpha: &Path) -> Result<Option<BoundaryPoint>> {
        if alpha.source() != self.source() {
            return Ok(None);
        }
        for (i, e) in alpha.edges().iter().enumerate() {
            if self.edge_at(i) != Some(e) {
                return Ok(None);
            }
        }
        match self {
            BoundaryPoint::Finite(p) => Ok(alpha.strip_prefix(g, p)?.map(BoundaryPoint::Finite)),
            BoundaryPoint::Lasso { prefix, cycle } => {
                // Unroll the cycle under the prefix until alpha fits inside.
                let mut long = prefix.clone();
                while long.len() < alpha.len() {
                    long = compose_paths(g, &long, cycle)?;
                }
                let rest = alpha
                    .strip_prefix(g, &long)?
                    .expect("edgewise comparison above succeeded");
                // rest · cycle^∞ rooted at r(alpha): the unrolled slack plus
                // the original cycle.
                Ok(Some(BoundaryPoint::lasso(g, rest, cycle.clone())?))
            }
        }
    }

    /// Appends a finite path in front: `alpha · self`.
    pub fn prepend(&self, g: &Graph, alpha: &Path) -> Result<BoundaryPoint> {
        match self {
            BoundaryPoint::Finite(p) => Ok(BoundaryPoint::Finite(compose_paths(g, alpha, p)?)),
            BoundaryPoint::Lasso { prefix, cycle } => {
                BoundaryPoint::lasso(g, compose_paths(g, alpha, prefix)?, cycle.clone())
            }
        }
    }
}

impl fmt::Display for BoundaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryPoint::Finite(p) => write!(f, "{p}"),
            BoundaryPoint::Lasso { prefix, cycle } => {
                if prefix.is_empty() {
                    write!(f, "({cycle})^inf")
                } else {
                    write!(f, "{prefix}.({cycle})^inf")
                }
            }
        }
    }
}

/// C(α, G) = C(α) ∖ ⋃_{e∈G} C(αe) with G ⊆ s⁻¹(r(α)).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CylinderSpec {
    pub alpha: Path,
    pub subtracted: BTreeSet<EdgeRef>,
}

impl CylinderSpec {
    pub fn new(g: &Graph, alpha: Path, subtracted: BTreeSet<EdgeRef>) -> Result<Self> {
        let r = alpha.range(g)?;
        for e in &subtracted {
            g.check_edge(e)?;
            if g.edge_source(e)? != r {
                return Err(LpaError::InvalidSpec(format!(
                    "subtracted edge {e} does not emit from r(alpha) = {r}"
                )));
            }
        }
        Ok(CylinderSpec { alpha, subtracted })
    }

    pub fn plain(g: &Graph, alpha: Path) -> Result<Self> {
        CylinderSpec::new(g, alpha, BTreeSet::new())
    }
}

impl fmt::Display for CylinderSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.subtracted.is_empty() {
            write!(f, "C({})", self.alpha)
        } else {
            let items: Vec<String> = self.subtracted.iter().map(|e| e.to_string()).collect();
            write!(f, "C({}; {{{}}})", self.alpha, items.join(","))
        }
    }
}

/// Outcome of intersecting two plain cylinders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CylinderMeet {
    Disjoint,
    /// One path extends the other: longer = shorter · remainder. The flag
    /// records whether `alpha` (the first argument) was the longer one.
    Extends {
        alpha_is_longer: bool,
        remainder: Path,
    },
}

/// Lemma-level intersection: C(α) ∩ C(β) is C(longer) when one path extends
/// the other and ∅ otherwise.
pub fn cylinder_meet(g: &Graph, alpha: &Path, beta: &Path) -> Result<CylinderMeet> {
    if beta.is_prefix_of(alpha) {
        let remainder = beta
            .strip_prefix(g, alpha)?
            .expect("prefix check just succeeded");
        return Ok(CylinderMeet::Extends {
            alpha_is_longer: true,
            remainder,
        });
    }
    if alpha.is_prefix_of(beta) {
        let remainder = alpha
            .strip_prefix(g, beta)?
            .expect("prefix check just succeeded");
        return Ok(CylinderMeet::Extends {
            alpha_is_longer: false,
            remainder,
        });
    }
    Ok(CylinderMeet::Disjoint)
}

/// Membership of a boundary point in Z(α, G) = C(α, G) ∩ X_E.
pub fn point_in_z(g: &Graph, x: &BoundaryPoint, spec: &CylinderSpec) -> Result<bool> {
    let tail = match x.strip_prefix(g, &spec.alpha)? {
        Some(tail) => tail,
        None => return Ok(false),
    };
    let first = tail.edge_at(0);
    Ok(!spec.subtracted.iter().any(|e| first == Some(e)))
}

/// Normalized form of ⋂_{α∈F} C(α) ∖ ⋃_{β∈G} C(β).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BasicSet {
    Empty,
    Specs(Vec<CylinderSpec>),
}

/// Normalizes a basic set into disjoint single-edge-subtraction cylinders.
pub fn normalize_basic_set(g: &Graph, f: &[Path], sub: &[Path]) -> Result<BasicSet> {
    let mut alpha = match f.first() {
        Some(first) => first.clone(),
        None => {
            return Err(LpaError::InvalidSpec(
                "basic set requires a nonempty positive family".into(),
            ))
        }
    };
    // The intersection is C(α) for the longest member, provided all members
    // are pairwise comparable.
    for p in &f[1..] {
        match cylinder_meet(g, &alpha, p)? {
            CylinderMeet::Disjoint => return Ok(BasicSet::Empty),
            CylinderMeet::Extends {
                alpha_is_longer, ..
            } => {
                if !alpha_is_longer {
                    alpha = p.clone();
                }
            }
        }
    }
    // Reduce each subtracted cylinder to a remainder out of r(α).
    let mut remainders: Vec<Path> = Vec::new();
    for beta in sub {
        match cylinder_meet(g, &alpha, beta)? {
            CylinderMeet::Disjoint => {}
            CylinderMeet::Extends {
                alpha_is_longer: true,
                ..
            } => return Ok(BasicSet::Empty), // C(α) ⊆ C(β)
            CylinderMeet::Extends {
                alpha_is_longer: false,
                remainder,
            } => remainders.push(remainder),
        }
    }
    let mut specs = Vec::new();
    emit_specs(g, &alpha, &remainders, &mut specs)?;
    Ok(BasicSet::Specs(specs))
}

/// C(α) ∖ ⋃ C(α·pᵢ) with every pᵢ nonempty, written as a disjoint union of
/// single-edge-subtraction cylinders.
fn emit_specs(
    g: &Graph,
    alpha: &Path,
    removed: &[Path],
    out: &mut Vec<CylinderSpec>,
) -> Result<()> {
    if removed.iter().any(|p| p.is_empty()) {
        // C(α) removed entirely.
        return Ok(());
    }
    let mut first_edges: BTreeSet<EdgeRef> = BTreeSet::new();
    for p in removed {
        first_edges.insert(p.edges()[0].clone());
    }
    out.push(CylinderSpec::new(g, alpha.clone(), first_edges.clone())?);
    for e in first_edges {
        // Fully removed branch: some pᵢ is exactly the single edge e.
        if removed.iter().any(|p| p.len() == 1 && p.edges()[0] == e) {
            continue;
        }
        let step = Path::single(g, e.clone())?;
        let alpha_e = compose_paths(g, alpha, &step)?;
        let deeper: Vec<Path> = removed
            .iter()
            .filter(|p| p.edges()[0] == e)
            .map(|p| step.strip_prefix(g, p))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        emit_specs(g, &alpha_e, &deeper, out)?;
    }
    Ok(())
}

/// All concrete vertices plus family members with index ≤ `family_limit`.
pub fn bounded_vertices(g: &Graph, family_limit: u64) -> Vec<VertexRef> {
    let mut out: Vec<VertexRef> = g
        .vertices
        .iter()
        .cloned()
        .map(VertexRef::Concrete)
        .collect();
    for fam in &g.vertex_families {
        for n in 1..=family_limit {
            out.push(VertexRef::FamilyMember(fam.clone(), n));
        }
    }
    out
}

/// All paths of length ≤ `maxlen` from bounded vertices, with edge-family
/// members enumerated up to `family_limit`.
pub fn enumerate_paths(g: &Graph, maxlen: usize, family_limit: u64) -> Result<Vec<Path>> {
    let mut out = Vec::new();
    let mut frontier = Vec::new();
    for v in bounded_vertices(g, family_limit) {
        frontier.push(Path::vertex(g, v)?);
    }
    out.extend(frontier.iter().cloned());
    for _ in 0..maxlen {
        let mut next = Vec::new();
        for p in &frontier {
            for e in g.out_edges_bounded(&p.range(g)?, family_limit)? {
                next.push(compose_paths(g, p, &Path::single(g, e)?)?);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    Ok(out)
}

/// A sample of boundary points: finite ones from path enumeration plus a
/// lasso for every enumerated cycle (with every enumerated feeding prefix).
pub fn sample_boundary_points(
    g: &Graph,
    maxlen: usize,
    family_limit: u64,
) -> Result<Vec<BoundaryPoint>> {
    let paths = enumerate_paths(g, maxlen, family_limit)?;
    let mut out = Vec::new();
    let mut cycles = Vec::new();
    for p in &paths {
        if in_xe(g, p)? {
            out.push(BoundaryPoint::Finite(p.clone()));
        }
        if !p.is_empty() && &p.range(g)? == p.source() {
            cycles.push(p.clone());
        }
    }
    let mut seen = BTreeSet::new();
    for c in &cycles {
        for p in &paths {
            if &p.range(g)? == c.source() {
                let point = BoundaryPoint::lasso(g, p.clone(), c.clone())?;
                if seen.insert(point.clone()) {
                    out.push(point);
                }
            }
        }
    }
    Ok(out)
}
