//! Exact arithmetic in the Leavitt path algebra L_K(E).
//!
//! Elements are K-linear combinations of the spanning monomials `p q*` with
//! r(p) = r(q). A confluent rewriting system — eliminating, at every regular
//! vertex, monomials whose paths both end in that vertex's *special* (least)
//! incoming representative of relation (4) — yields canonical normal forms,
//! so equality in L_K(E) is normal-form identity.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::{BigRational, One, Signed, Zero};

use crate::error::{LpaError, Result};
use crate::graph::{compose_paths, EdgeRef, Graph, Path, VertexRef};

/// Exact scalar: arbitrary-precision rational.
pub type Scalar = BigRational;

/// Convenience constructor for integer scalars.
pub fn scalar(n: i64) -> Scalar {
    Scalar::from_integer(n.into())
}

/// A spanning monomial `p q*` with r(p) = r(q).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    p: Path,
    q: Path,
}

impl Monomial {
    pub fn new(g: &Graph, p: Path, q: Path) -> Result<Self> {
        let rp = p.range(g)?;
        let rq = q.range(g)?;
        if rp != rq {
            return Err(LpaError::InvalidMonomial(format!(
                "ranges differ: r(p) = {rp}, r(q) = {rq}"
            )));
        }
        Ok(Monomial { p, q })
    }

    /// Constructor for internally-produced monomials already known valid.
    pub(crate) fn new_unchecked(p: Path, q: Path) -> Self {
        Monomial { p, q }
    }

    /// The vertex monomial `v = v v*`.
    pub fn vertex(g: &Graph, v: VertexRef) -> Result<Self> {
        let p = Path::vertex(g, v)?;
        Ok(Monomial { p: p.clone(), q: p })
    }

    /// The real-path monomial `p = p r(p)*`.
    pub fn path(g: &Graph, p: Path) -> Result<Self> {
        let q = Path::vertex(g, p.range(g)?)?;
        Ok(Monomial { p, q })
    }

    /// The ghost-path monomial `q* = r(q) q*`.
    pub fn ghost(g: &Graph, q: Path) -> Result<Self> {
        let p = Path::vertex(g, q.range(g)?)?;
        Ok(Monomial { p, q })
    }

    pub fn p(&self) -> &Path {
        &self.p
    }

    pub fn q(&self) -> &Path {
        &self.q
    }

    pub fn degree(&self) -> i64 {
        self.p.len() as i64 - self.q.len() as i64
    }

    pub fn star(&self) -> Monomial {
        Monomial {
            p: self.q.clone(),
            q: self.p.clone(),
        }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.p.edges().iter().map(|e| e.to_string()).collect();
        parts.extend(self.q.edges().iter().rev().map(|e| format!("{e}^")));
        if parts.is_empty() {
            write!(f, "{}", self.p.base())
        } else {
            write!(f, "{}", parts.join("."))
        }
    }
}

/// A finite K-linear combination of monomials. Zero coefficients are never
/// stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct LpaElement {
    terms: BTreeMap<Monomial, Scalar>,
}

impl LpaElement {
    pub fn zero() -> Self {
        LpaElement::default()
    }

    pub fn from_monomial(m: Monomial) -> Self {
        LpaElement::from_term(m, Scalar::one())
    }

    pub fn from_term(m: Monomial, c: Scalar) -> Self {
        let mut e = LpaElement::zero();
        e.add_term(m, c);
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
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

    pub fn add(&self, other: &LpaElement) -> LpaElement {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &LpaElement) -> LpaElement {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> LpaElement {
        LpaElement {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, k: &Scalar) -> LpaElement {
        if k.is_zero() {
            return LpaElement::zero();
        }
        LpaElement {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.clone() * k))
                .collect(),
        }
    }
}

impl fmt::Display for LpaElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{abs}*{m}")?;
            }
        }
        Ok(())
    }
}

/// The special edge of a regular vertex: least out-edge in the deterministic
/// ordering. `None` at sinks and infinite emitters.
pub fn special_edge(g: &Graph, v: &VertexRef) -> Result<Option<EdgeRef>> {
    Ok(g.regular_out_edges(v)?.map(|out| out[0].clone()))
}

/// Product of two monomials by relations (2) and (3):
/// (p q*)(γ δ*) = (pμ)δ* when γ = qμ, p(δν)* when q = γν, and 0 otherwise.
pub fn mul_monomial(g: &Graph, a: &Monomial, b: &Monomial) -> Result<LpaElement> {
    let (q, gamma, delta) = (&a.q, &b.p, &b.q);
    if q.is_prefix_of(gamma) {
        let mu = q
            .strip_prefix(g, gamma)?
            .expect("prefix check just succeeded");
        let p = compose_paths(g, &a.p, &mu)?;
        Ok(LpaElement::from_monomial(Monomial::new_unchecked(
            p,
            delta.clone(),
        )))
    } else if gamma.is_prefix_of(q) {
        let nu = gamma
            .strip_prefix(g, q)?
            .expect("prefix check just succeeded");
        let qq = compose_paths(g, delta, &nu)?;
        Ok(LpaElement::from_monomial(Monomial::new_unchecked(
            a.p.clone(),
            qq,
        )))
    } else {
        Ok(LpaElement::zero())
    }
}

/// Bilinear product of elements (not normalized).
pub fn mul(g: &Graph, a: &LpaElement, b: &LpaElement) -> Result<LpaElement> {
    let mut out = LpaElement::zero();
    for (ma, ca) in a.terms() {
        for (mb, cb) in b.terms() {
            let prod = mul_monomial(g, ma, mb)?;
            for (m, c) in prod.terms() {
                out.add_term(m.clone(), c.clone() * ca * cb);
            }
        }
    }
    Ok(out)
}

/// Drops the final edge of a path, yielding the parent prefix.
fn drop_last(g: &Graph, p: &Path) -> Result<Path> {
    let edges = p.edges();
    Path::new(g, p.base().clone(), edges[..edges.len() - 1].to_vec())
}

/// Reduction data: the regular source vertex and its full out-edge list, when
/// both paths of `m` end in that vertex's special edge.
fn reduction_site(g: &Graph, m: &Monomial) -> Result<Option<(EdgeRef, Vec<EdgeRef>)>> {
    let (last_p, last_q) = match (m.p.edges().last(), m.q.edges().last()) {
        (Some(a), Some(b)) if a == b => (a.clone(), b.clone()),
        _ => return Ok(None),
    };
    let _ = last_q;
    let v = g.edge_source(&last_p)?;
    let out = match g.regular_out_edges(&v)? {
        Some(out) => out,
        None => return Ok(None),
    };
    if out[0] == last_p {
        Ok(Some((last_p, out)))
    } else {
        Ok(None)
    }
}

/// Canonical normal form together with the number of rewrite steps taken.
pub fn normal_form_counted(g: &Graph, a: &LpaElement) -> Result<(LpaElement, u64)> {
    let mut work: Vec<(Monomial, Scalar)> =
        a.terms().map(|(m, c)| (m.clone(), c.clone())).collect();
    let mut out = LpaElement::zero();
    let mut steps = 0u64;
    while let Some((m, c)) = work.pop() {
        match reduction_site(g, &m)? {
            None => out.add_term(m, c),
            Some((special, siblings)) => {
                steps += 1;
                let p1 = drop_last(g, &m.p)?;
                let q1 = drop_last(g, &m.q)?;
                for e in siblings {
                    if e == special {
                        continue;
                    }
                    let pe = compose_paths(g, &p1, &Path::single(g, e.clone())?)?;
                    let qe = compose_paths(g, &q1, &Path::single(g, e)?)?;
                    work.push((Monomial::new_unchecked(pe, qe), -c.clone()));
                }
                work.push((Monomial::new_unchecked(p1, q1), c));
            }
        }
    }
    Ok((out, steps))
}

/// Canonical normal form: two elements are equal in L_K(E) iff their normal
/// forms are identical.
pub fn normal_form(g: &Graph, a: &LpaElement) -> Result<LpaElement> {
    Ok(normal_form_counted(g, a)?.0)
}

/// The *-involution: (p q*)* = q p*, conjugate-linear (identity on rationals).
pub fn star(a: &LpaElement) -> LpaElement {
    let mut out = LpaElement::zero();
    for (m, c) in a.terms() {
        out.add_term(m.star(), c.clone());
    }
    out
}

/// Splits an element by degree |p| − |q|.
pub fn graded_components(a: &LpaElement) -> BTreeMap<i64, LpaElement> {
    let mut out: BTreeMap<i64, LpaElement> = BTreeMap::new();
    for (m, c) in a.terms() {
        out.entry(m.degree())
            .or_default()
            .add_term(m.clone(), c.clone());
    }
    out
}

/// The sub-sum of monomials with s(p), s(q) ∈ H, and whether `a` already lay
/// in the corner-like subring Σ_{v,w∈H} v L_K(E) w.
pub fn corner_filter(a: &LpaElement, h: &BTreeSet<VertexRef>) -> (LpaElement, bool) {
    let mut kept = LpaElement::zero();
    let mut inside = true;
    for (m, c) in a.terms() {
        if h.contains(m.p.source()) && h.contains(m.q.source()) {
            kept.add_term(m.clone(), c.clone());
        } else {
            inside = false;
        }
    }
    (kept, inside)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    fn path(g: &Graph, base: &str, edges: &[&str]) -> Path {
        Path::new(
            g,
            VertexRef::concrete(base),
            edges.iter().map(|e| EdgeRef::concrete(*e)).collect(),
        )
        .unwrap()
    }

    fn clock_diag(g: &Graph, n: u64) -> Monomial {
        let p = Path::single(g, EdgeRef::member("e", n)).unwrap();
        Monomial::new(g, p.clone(), p).unwrap()
    }

    #[test]
    fn monomial_requires_matching_ranges() {
        let g = samples::parallel_pair();
        let p = path(&g, "a", &["x"]);
        let v = Path::vertex(&g, VertexRef::concrete("a")).unwrap();
        assert!(Monomial::new(&g, p, v).is_err());
    }

    #[test]
    fn diagonal_products_in_clock() {
        let g = samples::clock();
        let m1 = clock_diag(&g, 1);
        let m2 = clock_diag(&g, 2);
        assert!(mul_monomial(&g, &m1, &m2).unwrap().is_zero());
        assert_eq!(
            mul_monomial(&g, &m1, &m1).unwrap(),
            LpaElement::from_monomial(m1)
        );
    }

    #[test]
    fn ghost_real_product() {
        let g = samples::parallel_pair();
        let x = path(&g, "a", &["x"]);
        let y = path(&g, "a", &["y"]);
        let xx = Monomial::new(&g, x.clone(), x.clone()).unwrap();
        let xy = Monomial::new(&g, x.clone(), y.clone()).unwrap();
        // (x x*)(x y*) = x y* by relation (3).
        assert_eq!(
            mul_monomial(&g, &xx, &xy).unwrap(),
            LpaElement::from_monomial(xy)
        );
    }

    #[test]
    fn ck_relation_collapses() {
        let g = samples::parallel_pair();
        let x = path(&g, "a", &["x"]);
        let y = path(&g, "a", &["y"]);
        let sum = LpaElement::from_monomial(Monomial::new(&g, x.clone(), x.clone()).unwrap()).add(
            &LpaElement::from_monomial(Monomial::new(&g, y.clone(), y.clone()).unwrap()),
        );
        let a = LpaElement::from_monomial(Monomial::vertex(&g, VertexRef::concrete("a")).unwrap());
        assert_eq!(normal_form(&g, &sum).unwrap(), a);
    }

    #[test]
    fn vertex_is_irreducible() {
        let g = samples::parallel_pair();
        let a = LpaElement::from_monomial(Monomial::vertex(&g, VertexRef::concrete("a")).unwrap());
        assert_eq!(normal_form(&g, &a).unwrap(), a);
    }

    #[test]
    fn single_rewrite_step() {
        let g = samples::parallel_pair();
        let x = path(&g, "a", &["x"]);
        let y = path(&g, "a", &["y"]);
        let xx = LpaElement::from_monomial(Monomial::new(&g, x.clone(), x.clone()).unwrap());
        let expected =
            LpaElement::from_monomial(Monomial::vertex(&g, VertexRef::concrete("a")).unwrap()).sub(
                &LpaElement::from_monomial(Monomial::new(&g, y.clone(), y.clone()).unwrap()),
            );
        let (nf, steps) = normal_form_counted(&g, &xx).unwrap();
        assert_eq!(nf, expected);
        assert_eq!(steps, 1);
    }

    #[test]
    fn star_is_involutive() {
        let g = samples::parallel_pair();
        let x = path(&g, "a", &["x"]);
        let y = path(&g, "a", &["y"]);
        let xy = LpaElement::from_monomial(Monomial::new(&g, x.clone(), y.clone()).unwrap());
        let yx = LpaElement::from_monomial(Monomial::new(&g, y, x).unwrap());
        assert_eq!(star(&xy), yx);
        assert_eq!(star(&star(&xy)), xy);
    }

    #[test]
    fn grading_splits_by_degree() {
        let g = samples::single_loop();
        let u = Monomial::vertex(&g, VertexRef::concrete("u")).unwrap();
        let c = Monomial::path(&g, path(&g, "u", &["c"])).unwrap();
        let a = LpaElement::from_monomial(u.clone()).add(&LpaElement::from_monomial(c.clone()));
        let comps = graded_components(&a);
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[&0], LpaElement::from_monomial(u));
        assert_eq!(comps[&1], LpaElement::from_monomial(c));
    }

    #[test]
    fn corner_filter_by_sources() {
        let g = samples::clock();
        let v = VertexRef::concrete("v");
        let h: BTreeSet<VertexRef> = [v.clone()].into_iter().collect();
        let vv = LpaElement::from_monomial(Monomial::vertex(&g, v.clone()).unwrap());
        let w1 =
            LpaElement::from_monomial(Monomial::vertex(&g, VertexRef::member("w", 1)).unwrap());
        let (kept, flag) = corner_filter(&vv.add(&w1), &h);
        assert_eq!(kept, vv);
        assert!(!flag);
        let e1 = LpaElement::from_monomial(clock_diag(&g, 1));
        let (kept, flag) = corner_filter(&e1, &h);
        assert_eq!(kept, e1);
        assert!(flag);
    }

    #[test]
    fn clock_corner_identity() {
        // e_n* v e_n = w_n.
        let g = samples::clock();
        let v = LpaElement::from_monomial(Monomial::vertex(&g, VertexRef::concrete("v")).unwrap());
        for n in 1..=10 {
            let en = Path::single(&g, EdgeRef::member("e", n)).unwrap();
            let real = LpaElement::from_monomial(Monomial::path(&g, en.clone()).unwrap());
            let ghost = LpaElement::from_monomial(Monomial::ghost(&g, en).unwrap());
            let prod = mul(&g, &mul(&g, &ghost, &v).unwrap(), &real).unwrap();
            let wn =
                LpaElement::from_monomial(Monomial::vertex(&g, VertexRef::member("w", n)).unwrap());
            assert_eq!(normal_form(&g, &prod).unwrap(), wn);
        }
    }
}
