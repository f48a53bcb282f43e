//! The boundary-path groupoid 𝒢_E and its Steinberg algebra A_K(𝒢_E).
//!
//! Arrows are triples (μ·x, |μ|−|ν|, ν·x) stored as (μ, ν, shared tail) in a
//! canonical minimal representation. Elements are linear combinations of
//! indicators of the basic bisections Z(α, β); convolution is computed on the
//! basis (1_U ∗ 1_V = 1_{UV}) and normalized by transport along π_E through
//! the Leavitt-path-algebra normal form, with pointwise evaluation available
//! as an independent check.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::Zero;

use crate::error::{LpaError, Result};
use crate::graph::{compose_paths, Graph, Path, VertexRef};
use crate::lpa::{self, LpaElement, Monomial, Scalar};
use crate::path_space::{enumerate_paths, BoundaryPoint};

/// An arrow (μ·tail, |μ|−|ν|, ν·tail) of 𝒢_E, canonicalized so that μ and ν
/// do not share a final edge.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct GroupoidPoint {
    mu: Path,
    nu: Path,
    tail: BoundaryPoint,
}

impl GroupoidPoint {
    pub fn new(g: &Graph, mu: Path, nu: Path, tail: BoundaryPoint) -> Result<Self> {
        let rm = mu.range(g)?;
        let rn = nu.range(g)?;
        if &rm != tail.source() || &rn != tail.source() {
            return Err(LpaError::NonComposable(
                format!("r(mu) = {rm}, r(nu) = {rn}"),
                tail.source().to_string(),
            ));
        }
        let mut mu = mu;
        let mut nu = nu;
        let mut tail = tail;
        // Pop common final edges into the tail: (μ'e, ν'e, x) = (μ', ν', e·x).
        while let (Some(a), Some(b)) = (mu.edges().last(), nu.edges().last()) {
            if a != b {
                break;
            }
            let e = Path::single(g, a.clone())?;
            tail = tail.prepend(g, &e)?;
            mu = Path::new(g, mu.base().clone(), mu.edges()[..mu.len() - 1].to_vec())?;
            nu = Path::new(g, nu.base().clone(), nu.edges()[..nu.len() - 1].to_vec())?;
        }
        Ok(GroupoidPoint { mu, nu, tail })
    }

    /// The unit arrow at a boundary point.
    pub fn unit(g: &Graph, x: BoundaryPoint) -> Result<Self> {
        let v = Path::vertex(g, x.source().clone())?;
        GroupoidPoint::new(g, v.clone(), v, x)
    }

    pub fn mu(&self) -> &Path {
        &self.mu
    }

    pub fn nu(&self) -> &Path {
        &self.nu
    }

    pub fn tail(&self) -> &BoundaryPoint {
        &self.tail
    }

    pub fn degree(&self) -> i64 {
        self.mu.len() as i64 - self.nu.len() as i64
    }

    /// The boundary point μ·tail (range of the arrow).
    pub fn range_point(&self, g: &Graph) -> Result<BoundaryPoint> {
        self.tail.prepend(g, &self.mu)
    }

    /// The boundary point ν·tail (source of the arrow).
    pub fn source_point(&self, g: &Graph) -> Result<BoundaryPoint> {
        self.tail.prepend(g, &self.nu)
    }

    pub fn inverse(&self) -> GroupoidPoint {
        GroupoidPoint {
            mu: self.nu.clone(),
            nu: self.mu.clone(),
            tail: self.tail.clone(),
        }
    }
}

impl fmt::Display for GroupoidPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}, {} | tail {})",
            self.mu,
            self.degree(),
            self.nu,
            self.tail
        )
    }
}

/// Composition (x, k, y)(y, l, z) = (x, k + l, z).
pub fn compose_points(g: &Graph, a: &GroupoidPoint, b: &GroupoidPoint) -> Result<GroupoidPoint> {
    if a.source_point(g)? != b.range_point(g)? {
        return Err(LpaError::NonComposable(a.to_string(), b.to_string()));
    }
    // ν_a·tail_a = μ_b·tail_b, so the shorter middle path prefixes the longer.
    if b.mu.is_prefix_of(&a.nu) {
        let sigma =
            b.mu.strip_prefix(g, &a.nu)?
                .expect("prefix check just succeeded");
        GroupoidPoint::new(
            g,
            a.mu.clone(),
            compose_paths(g, &b.nu, &sigma)?,
            a.tail.clone(),
        )
    } else {
        let sigma =
            a.nu.strip_prefix(g, &b.mu)?
                .expect("middle points agree, so one path prefixes the other");
        GroupoidPoint::new(
            g,
            compose_paths(g, &a.mu, &sigma)?,
            b.nu.clone(),
            b.tail.clone(),
        )
    }
}

/// The basic compact open bisection Z(α, β) with r(α) = r(β).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Bisection {
    pub alpha: Path,
    pub beta: Path,
}

impl Bisection {
    pub fn new(g: &Graph, alpha: Path, beta: Path) -> Result<Self> {
        let ra = alpha.range(g)?;
        let rb = beta.range(g)?;
        if ra != rb {
            return Err(LpaError::InvalidSpec(format!(
                "Z(alpha, beta) requires r(alpha) = r(beta); got {ra} and {rb}"
            )));
        }
        Ok(Bisection { alpha, beta })
    }

    pub fn unit(g: &Graph, v: VertexRef) -> Result<Self> {
        let p = Path::vertex(g, v)?;
        Ok(Bisection {
            alpha: p.clone(),
            beta: p,
        })
    }

    /// Membership of an arrow: both endpoints extend (α, β) with a shared
    /// remainder and the degrees agree.
    pub fn contains(&self, g: &Graph, pt: &GroupoidPoint) -> Result<bool> {
        if pt.degree() != self.alpha.len() as i64 - self.beta.len() as i64 {
            return Ok(false);
        }
        let t1 = pt.range_point(g)?.strip_prefix(g, &self.alpha)?;
        let t2 = pt.source_point(g)?.strip_prefix(g, &self.beta)?;
        Ok(match (t1, t2) {
            (Some(t1), Some(t2)) => t1 == t2,
            _ => false,
        })
    }
}

impl fmt::Display for Bisection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z({}, {})", self.alpha, self.beta)
    }
}

/// Set product of basic bisections: mirrors the monomial product exactly.
pub fn bisection_product(g: &Graph, a: &Bisection, b: &Bisection) -> Result<Option<Bisection>> {
    if a.beta.is_prefix_of(&b.alpha) {
        let mu = a
            .beta
            .strip_prefix(g, &b.alpha)?
            .expect("prefix check just succeeded");
        Ok(Some(Bisection::new(
            g,
            compose_paths(g, &a.alpha, &mu)?,
            b.beta.clone(),
        )?))
    } else if b.alpha.is_prefix_of(&a.beta) {
        let nu = b
            .alpha
            .strip_prefix(g, &a.beta)?
            .expect("prefix check just succeeded");
        Ok(Some(Bisection::new(
            g,
            a.alpha.clone(),
            compose_paths(g, &b.beta, &nu)?,
        )?))
    } else {
        Ok(None)
    }
}

/// A K-linear combination of bisection indicators.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SteinbergElement {
    terms: BTreeMap<Bisection, Scalar>,
}

impl SteinbergElement {
    pub fn zero() -> Self {
        SteinbergElement::default()
    }

    pub fn indicator(b: Bisection) -> Self {
        let mut e = SteinbergElement::zero();
        e.add_term(b, Scalar::from_integer(1.into()));
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Bisection, &Scalar)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, b: Bisection, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(b) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().clone() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &SteinbergElement) -> SteinbergElement {
        let mut out = self.clone();
        for (b, c) in other.terms() {
            out.add_term(b.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &SteinbergElement) -> SteinbergElement {
        let mut out = self.clone();
        for (b, c) in other.terms() {
            out.add_term(b.clone(), -c.clone());
        }
        out
    }
}

impl fmt::Display for SteinbergElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(b, c)| format!("{c}*1_{b}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// π_E: p q* ↦ 1_{Z(p,q)}, extended linearly.
pub fn pi_map(a: &LpaElement) -> SteinbergElement {
    let mut out = SteinbergElement::zero();
    for (m, c) in a.terms() {
        out.add_term(
            Bisection {
                alpha: m.p().clone(),
                beta: m.q().clone(),
            },
            c.clone(),
        );
    }
    out
}

/// π_E⁻¹: 1_{Z(α,β)} ↦ α β*, extended linearly.
pub fn pi_inv(g: &Graph, f: &SteinbergElement) -> Result<LpaElement> {
    let mut out = LpaElement::zero();
    for (b, c) in f.terms() {
        out.add_term(
            Monomial::new(g, b.alpha.clone(), b.beta.clone())?,
            c.clone(),
        );
    }
    Ok(out)
}

/// Normal form transported along π_E.
pub fn normalize(g: &Graph, f: &SteinbergElement) -> Result<SteinbergElement> {
    Ok(pi_map(&lpa::normal_form(g, &pi_inv(g, f)?)?))
}

/// Convolution: bilinear extension of the bisection product, normalized.
pub fn convolve(g: &Graph, f: &SteinbergElement, h: &SteinbergElement) -> Result<SteinbergElement> {
    let mut raw = SteinbergElement::zero();
    for (a, ca) in f.terms() {
        for (b, cb) in h.terms() {
            if let Some(prod) = bisection_product(g, a, b)? {
                raw.add_term(prod, ca.clone() * cb);
            }
        }
    }
    normalize(g, &raw)
}

/// Value of `f` at an arrow: the coefficient sum over bisections containing
/// it.
pub fn evaluate(g: &Graph, f: &SteinbergElement, pt: &GroupoidPoint) -> Result<Scalar> {
    let mut sum = Scalar::zero();
    for (b, c) in f.terms() {
        if b.contains(g, pt)? {
            sum += c.clone();
        }
    }
    Ok(sum)
}

/// Independent convolution oracle: (f ∗ h)(γ) = Σ_{γ = a·b} f(a) h(b),
/// enumerating the (at most one per bisection of f) arrows a with
/// r(a) = r(γ).
pub fn convolve_pointwise(
    g: &Graph,
    f: &SteinbergElement,
    h: &SteinbergElement,
    gamma: &GroupoidPoint,
) -> Result<Scalar> {
    let range_pt = gamma.range_point(g)?;
    let mut arrows: BTreeSet<GroupoidPoint> = BTreeSet::new();
    for (b, _) in f.terms() {
        if let Some(t) = range_pt.strip_prefix(g, &b.alpha)? {
            arrows.insert(GroupoidPoint::new(g, b.alpha.clone(), b.beta.clone(), t)?);
        }
    }
    let mut sum = Scalar::zero();
    for a in arrows {
        let rest = compose_points(g, &a.inverse(), gamma)?;
        sum += evaluate(g, f, &a)? * evaluate(g, h, &rest)?;
    }
    Ok(sum)
}

/// All Z(α, β) with |α|, |β| ≤ maxlen and s(α), s(β) ∈ H, edge-family
/// members enumerated up to `family_limit`, deterministically ordered.
pub fn restrict_basis(
    g: &Graph,
    h: &BTreeSet<VertexRef>,
    maxlen: usize,
    family_limit: u64,
) -> Result<Vec<Bisection>> {
    let paths: Vec<Path> = enumerate_paths(g, maxlen, family_limit)?
        .into_iter()
        .filter(|p| h.contains(p.source()))
        .collect();
    let mut out = Vec::new();
    for a in &paths {
        for b in &paths {
            if a.range(g)? == b.range(g)? {
                out.push(Bisection {
                    alpha: a.clone(),
                    beta: b.clone(),
                });
            }
        }
    }
    out.sort();
    Ok(out)
}
