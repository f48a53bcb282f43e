//! End-to-end acceptance gate. Each criterion prints a single pass/fail
//! line; all arithmetic is exact.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, resume_unwind, AssertUnwindSafe};

use lpa_core::{
    assemble_universe, audit_witness, cateiso_pipeline, convolve, convolve_pointwise,
    cstar_pipeline, end_pipeline, equivalent, evaluate, graded_components, mul, normal_form,
    normal_form_counted, normalize_projective_spec, out_split, pi_inv, pi_map, restrict_basis,
    sample_boundary_points, samples, spec_to_monoid, star, Bisection, EdgeRef, Equivalence, Graph,
    GroupoidPoint, LpaElement, MonoidElement, MonoidGen, Monomial, Path, ProjectiveSpec,
    ProjectiveSummand, Scalar, SteinbergElement, VertexRef,
};
use num::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn criterion<F: FnOnce()>(n: u32, desc: &str, body: F) {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(()) => println!("criterion {n}: PASS — {desc}"),
        Err(e) => {
            println!("criterion {n}: FAIL — {desc}");
            resume_unwind(e);
        }
    }
}

fn v(id: &str) -> VertexRef {
    VertexRef::concrete(id)
}

fn elem(g: &Graph, p: Path, q: Path) -> LpaElement {
    LpaElement::from_monomial(Monomial::new(g, p, q).unwrap())
}

fn nf(g: &Graph, a: &LpaElement) -> LpaElement {
    normal_form(g, a).unwrap()
}

fn prod(g: &Graph, a: &LpaElement, b: &LpaElement) -> LpaElement {
    nf(g, &mul(g, a, b).unwrap())
}

fn summand(vertex: VertexRef, edges: &[EdgeRef], mult: u64) -> ProjectiveSummand {
    ProjectiveSummand {
        vertex,
        edges: edges.iter().cloned().collect(),
        mult,
    }
}

/// Paths of the graph grouped by range, for monomial sampling.
fn paths_by_range(g: &Graph, maxlen: usize, family_limit: u64) -> Vec<Vec<Path>> {
    let mut by_range: BTreeMap<VertexRef, Vec<Path>> = BTreeMap::new();
    for p in lpa_core::enumerate_paths(g, maxlen, family_limit).unwrap() {
        by_range.entry(p.range(g).unwrap()).or_default().push(p);
    }
    by_range.into_values().collect()
}

fn random_monomial(g: &Graph, buckets: &[Vec<Path>], rng: &mut ChaCha8Rng) -> Monomial {
    let bucket = &buckets[rng.gen_range(0..buckets.len())];
    let p = bucket[rng.gen_range(0..bucket.len())].clone();
    let q = bucket[rng.gen_range(0..bucket.len())].clone();
    Monomial::new(g, p, q).unwrap()
}

fn random_element(g: &Graph, buckets: &[Vec<Path>], rng: &mut ChaCha8Rng) -> LpaElement {
    let mut out = LpaElement::zero();
    for _ in 0..rng.gen_range(1..=4usize) {
        let c = Scalar::from_integer(rng.gen_range(-5i64..=5).into());
        out.add_term(random_monomial(g, buckets, rng), c);
    }
    out
}

// ---------------------------------------------------------------------------
// 1. Clock-graph corner over H = {v}
// ---------------------------------------------------------------------------

/// Elements of the unitized direct sum K ⊕ (⊕_n K ε_n).
type Unitized = (Scalar, BTreeMap<u64, Scalar>);

fn unitized_mul(a: &Unitized, b: &Unitized) -> Unitized {
    let mut x = BTreeMap::new();
    for (n, c) in &a.1 {
        *x.entry(*n).or_insert_with(Scalar::zero) += c * &b.0;
    }
    for (n, c) in &b.1 {
        *x.entry(*n).or_insert_with(Scalar::zero) += c * &a.0;
    }
    for (n, c) in &a.1 {
        if let Some(d) = b.1.get(n) {
            *x.entry(*n).or_insert_with(Scalar::zero) += c * d;
        }
    }
    x.retain(|_, c| !c.is_zero());
    (&a.0 * &b.0, x)
}

#[test]
fn criterion_1_clock_corner() {
    criterion(1, "clock corner over H = {v} is Span{v, e_n e_n*}", || {
        let g = samples::clock();
        let h: BTreeSet<VertexRef> = [v("v")].into_iter().collect();

        let vertex_elem = elem(
            &g,
            Path::vertex(&g, v("v")).unwrap(),
            Path::vertex(&g, v("v")).unwrap(),
        );
        let projector = |n: u64| {
            let e = Path::single(&g, EdgeRef::member("e", n)).unwrap();
            elem(&g, e.clone(), e)
        };

        // Exact corner basis to family index 10, path length 2.
        let basis = restrict_basis(&g, &h, 2, 10).unwrap();
        let got: BTreeSet<LpaElement> = basis
            .iter()
            .map(|b| pi_inv(&g, &SteinbergElement::indicator(b.clone())).unwrap())
            .collect();
        let mut expected: BTreeSet<LpaElement> = (1..=10).map(projector).collect();
        expected.insert(vertex_elem.clone());
        assert_eq!(got, expected);

        // Matrix-unit products: (e_n e_n*)(e_m e_m*) = δ_nm e_n e_n*.
        for n in 1..=10 {
            for m in 1..=10 {
                let p = prod(&g, &projector(n), &projector(m));
                if n == m {
                    assert_eq!(p, projector(n));
                } else {
                    assert!(p.is_zero(), "projectors {n}, {m} not orthogonal");
                }
            }
        }

        // v ↦ (1, 0), e_n e_n* ↦ (0, ε_n) is multiplicative.
        let phi = |x: &LpaElement| -> Unitized {
            if x.is_zero() {
                return (Scalar::zero(), BTreeMap::new());
            }
            if *x == vertex_elem {
                return (Scalar::one(), BTreeMap::new());
            }
            for n in 1..=10 {
                if *x == projector(n) {
                    return (Scalar::zero(), [(n, Scalar::one())].into_iter().collect());
                }
            }
            panic!("product left the corner basis span: {x}");
        };
        let mut all: Vec<LpaElement> = (1..=10).map(projector).collect();
        all.push(vertex_elem.clone());
        for a in &all {
            for b in &all {
                assert_eq!(phi(&prod(&g, a, b)), unitized_mul(&phi(a), &phi(b)));
            }
        }

        // normal_form(e_n* v e_n) = w_n.
        for n in 1..=10 {
            let e = Path::single(&g, EdgeRef::member("e", n)).unwrap();
            let ghost = LpaElement::from_monomial(Monomial::ghost(&g, e.clone()).unwrap());
            let edge = LpaElement::from_monomial(Monomial::path(&g, e).unwrap());
            let x = prod(&g, &prod(&g, &ghost, &vertex_elem), &edge);
            let wn = Path::vertex(&g, VertexRef::member("w", n)).unwrap();
            assert_eq!(x, elem(&g, wn.clone(), wn));
        }
    });
}

// ---------------------------------------------------------------------------
// 2. Two-fan example end-to-end
// ---------------------------------------------------------------------------

fn fan_spec() -> ProjectiveSpec {
    vec![
        summand(v("v"), &[EdgeRef::concrete("e")], 1),
        summand(v("v"), &[EdgeRef::member("f", 1)], 1),
    ]
}

#[test]
fn criterion_2_fan_pipeline() {
    criterion(
        2,
        "fan example: decompose, multiplicities, H, 5x5 shape",
        || {
            let g = samples::double_fan();
            let spec = fan_spec();

            let normalized = normalize_projective_spec(&g, &spec).unwrap();
            let expected: BTreeSet<ProjectiveSummand> = [
                summand(
                    v("v"),
                    &[EdgeRef::concrete("e"), EdgeRef::member("f", 1)],
                    2,
                ),
                summand(v("v"), &[], 1),
                summand(v("w"), &[], 1),
            ]
            .into_iter()
            .collect();
            assert_eq!(
                normalized.iter().cloned().collect::<BTreeSet<_>>(),
                expected
            );

            let cate = cateiso_pipeline(&g, &normalized).unwrap();
            let mults: BTreeMap<VertexRef, u64> = [(v("v1"), 1), (v("v2"), 3), (v("w"), 1)]
                .into_iter()
                .collect();
            assert_eq!(cate.mults, mults);

            let report = end_pipeline(&g, &spec).unwrap();
            let h = vec![v("v1"), v("v2_2"), v("v2_1"), v("v2"), v("w")];
            assert_eq!(report.h, h);
            assert_eq!(report.matrix_shape.len(), 5);
            for (i, row) in report.matrix_shape.iter().enumerate() {
                assert_eq!(row.len(), 5);
                for (j, cell) in row.iter().enumerate() {
                    assert_eq!(*cell, format!("{} L {}", h[i], h[j]));
                }
            }
        },
    );
}

// ---------------------------------------------------------------------------
// 3. Out-split relation audit
// ---------------------------------------------------------------------------

fn audit_out_split(g: &Graph, at: VertexRef, part: &[EdgeRef]) {
    let split = out_split(g, &at, &part.iter().cloned().collect()).unwrap();
    let target = &split.graph;
    let limit = 3;
    let vertices = lpa_core::bounded_vertices(g, limit);
    let edges: Vec<EdgeRef> = lpa_core::enumerate_paths(g, 1, limit)
        .unwrap()
        .into_iter()
        .filter(|p| p.len() == 1)
        .map(|p| p.edges()[0].clone())
        .collect();

    let img_v: BTreeMap<VertexRef, LpaElement> = vertices
        .iter()
        .map(|x| (x.clone(), split.map_vertex_elem(x).unwrap()))
        .collect();
    let img_e: BTreeMap<EdgeRef, LpaElement> = edges
        .iter()
        .map(|e| (e.clone(), split.map_edge_elem(e).unwrap()))
        .collect();

    // Relation (1): vw = δ_vw w, and degree 0.
    for a in &vertices {
        for b in &vertices {
            let p = prod(target, &img_v[a], &img_v[b]);
            if a == b {
                assert_eq!(p, nf(target, &img_v[a]));
            } else {
                assert!(p.is_zero());
            }
        }
        let degrees: Vec<i64> = graded_components(&img_v[a]).into_keys().collect();
        assert!(degrees.iter().all(|d| *d == 0));
    }

    // Relation (2): s(e)e = e = e r(e), and degree 1.
    for e in &edges {
        let s = g.edge_source(e).unwrap();
        let r = g.edge_range(e).unwrap();
        let left = prod(target, &img_v[&s], &img_e[e]);
        let right = prod(target, &img_e[e], &img_v[&r]);
        assert_eq!(left, nf(target, &img_e[e]));
        assert_eq!(right, nf(target, &img_e[e]));
        let degrees: Vec<i64> = graded_components(&img_e[e]).into_keys().collect();
        assert!(degrees.iter().all(|d| *d == 1));
    }

    // Relation (3): e*f = δ_ef r(e).
    for e in &edges {
        for f in &edges {
            let p = prod(target, &star(&img_e[e]), &img_e[f]);
            if e == f {
                assert_eq!(p, nf(target, &img_v[&g.edge_range(e).unwrap()]));
            } else {
                assert!(p.is_zero(), "e*f != 0 for {e}, {f}");
            }
        }
    }

    // Relation (4) at regular vertices of the source.
    for a in &vertices {
        if let Some(out) = g.regular_out_edges(a).unwrap() {
            let mut sum = LpaElement::zero();
            for e in &out {
                let img = &img_e[e];
                sum = sum.add(&mul(target, img, &star(img)).unwrap());
            }
            assert_eq!(nf(target, &sum), nf(target, &img_v[a]));
        }
    }

    // Orthogonality of the doubled copies: e¹(e²)* = e²(e¹)* = 0.
    for (e1, e2) in split.doubled_edges.values() {
        let first = LpaElement::from_monomial(
            Monomial::path(target, Path::single(target, EdgeRef::concrete(e1)).unwrap()).unwrap(),
        );
        let second = LpaElement::from_monomial(
            Monomial::ghost(target, Path::single(target, EdgeRef::concrete(e2)).unwrap()).unwrap(),
        );
        assert!(prod(target, &first, &second).is_zero());
        assert!(prod(target, &star(&second), &star(&first)).is_zero());
    }
}

#[test]
fn criterion_3_out_split_audit() {
    criterion(3, "out-split images satisfy relations (1)-(4)", || {
        audit_out_split(&samples::parallel_pair(), v("a"), &[EdgeRef::concrete("x")]);
        audit_out_split(&samples::clock(), v("v"), &[EdgeRef::member("e", 1)]);
        audit_out_split(
            &samples::double_fan(),
            v("v"),
            &[EdgeRef::concrete("e"), EdgeRef::member("f", 1)],
        );
    });
}

// ---------------------------------------------------------------------------
// 4. π homomorphism suite
// ---------------------------------------------------------------------------

/// All distinct arrows over the sampled tails, capped at `cap`. Small graphs
/// (T2) have fewer than 20 arrows at these bounds; we then use all of them.
fn sample_groupoid_points(g: &Graph, cap: usize) -> Vec<GroupoidPoint> {
    let mut points = BTreeSet::new();
    let tails = sample_boundary_points(g, 3, 5).unwrap();
    let paths = lpa_core::enumerate_paths(g, 2, 5).unwrap();
    for x in &tails {
        points.insert(GroupoidPoint::unit(g, x.clone()).unwrap());
        for mu in &paths {
            for nu in &paths {
                if mu.range(g).unwrap() == *x.source() && nu.range(g).unwrap() == *x.source() {
                    points
                        .insert(GroupoidPoint::new(g, mu.clone(), nu.clone(), x.clone()).unwrap());
                }
            }
        }
    }
    points.into_iter().take(cap).collect()
}

#[test]
fn criterion_4_pi_homomorphism() {
    criterion(
        4,
        "pi is a homomorphism; convolution matches pointwise",
        || {
            let graphs = [
                samples::parallel_pair(),
                samples::clock(),
                samples::loop_with_exit(),
                samples::double_fan(),
            ];
            let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0004);
            for g in &graphs {
                let buckets = paths_by_range(g, 3, 3);
                for _ in 0..200 {
                    let a = LpaElement::from_monomial(random_monomial(g, &buckets, &mut rng));
                    let b = LpaElement::from_monomial(random_monomial(g, &buckets, &mut rng));
                    let lhs = pi_map(&nf(g, &mul(g, &a, &b).unwrap()));
                    let rhs = convolve(g, &pi_map(&a), &pi_map(&b)).unwrap();
                    assert_eq!(lhs, rhs, "pi not multiplicative on {a}, {b}");
                }
                let points = sample_groupoid_points(g, 40);
                if g != &samples::parallel_pair() {
                    assert!(points.len() >= 20, "not enough sample points");
                } else {
                    // The finite graph's groupoid has exactly 9 arrows at
                    // these bounds; use every one of them.
                    assert_eq!(points.len(), 9);
                }
                if g == &samples::loop_with_exit() {
                    assert!(
                        points
                            .iter()
                            .any(|p| matches!(p.tail(), lpa_core::BoundaryPoint::Lasso { .. })),
                        "loop graph must contribute lasso points"
                    );
                }
                for _ in 0..50 {
                    let f = pi_map(&LpaElement::from_monomial(random_monomial(
                        g, &buckets, &mut rng,
                    )));
                    let h = pi_map(&LpaElement::from_monomial(random_monomial(
                        g, &buckets, &mut rng,
                    )));
                    let conv = convolve(g, &f, &h).unwrap();
                    for gamma in &points {
                        assert_eq!(
                            evaluate(g, &conv, gamma).unwrap(),
                            convolve_pointwise(g, &f, &h, gamma).unwrap()
                        );
                    }
                }
            }
        },
    );
}

// ---------------------------------------------------------------------------
// 5. Monoid suite
// ---------------------------------------------------------------------------

fn assert_equivalent(g: &Graph, x: &MonoidElement, y: &MonoidElement, depth: u32) {
    let universe = assemble_universe(&[x, y]);
    match equivalent(g, x, y, &universe, depth).unwrap() {
        Equivalence::Yes(w) => {
            assert!(
                audit_witness(g, x, y, &universe, &w).unwrap(),
                "bad witness"
            );
        }
        Equivalence::Unknown => panic!("expected Yes for {x} ~ {y} at depth {depth}"),
    }
}

#[test]
fn criterion_5_monoid_suite() {
    criterion(
        5,
        "monoid relations, spec normalization, audited witnesses",
        || {
            // Relation (1) at a regular vertex: a = 2b in T2.
            let t2 = samples::parallel_pair();
            let mut two_b = MonoidElement::zero();
            two_b.add(MonoidGen::Vertex(v("b")), 2);
            assert_equivalent(&t2, &MonoidElement::vertex(v("a")), &two_b, 1);

            // Relation (2) at the clock's infinite emitter: v = w_1 + q_{v,{e_1}}.
            let clock = samples::clock();
            let q1 = MonoidGen::Q {
                vertex: v("v"),
                edges: [EdgeRef::member("e", 1)].into_iter().collect(),
            };
            let mut rhs = MonoidElement::vertex(VertexRef::member("w", 1));
            rhs.add(q1.clone(), 1);
            assert_equivalent(&clock, &MonoidElement::vertex(v("v")), &rhs, 1);

            // Relation (3): q_Z = Σ_{W∖Z} r(e) + q_W for Z ⊊ W.
            let qw = MonoidGen::Q {
                vertex: v("v"),
                edges: [EdgeRef::member("e", 1), EdgeRef::member("e", 2)]
                    .into_iter()
                    .collect(),
            };
            let mut lhs = MonoidElement::zero();
            lhs.add(q1, 1);
            let mut rhs = MonoidElement::vertex(VertexRef::member("w", 2));
            rhs.add(qw, 1);
            assert_equivalent(&clock, &lhs, &rhs, 1);

            // normalize_projective_spec preserves the monoid class at depth <= 10.
            let fan = samples::double_fan();
            let specs: Vec<(Graph, ProjectiveSpec)> = vec![
                (fan.clone(), fan_spec()),
                (fan.clone(), vec![summand(v("w"), &[], 1)]),
                (clock.clone(), vec![summand(v("v"), &[], 2)]),
                (
                    clock.clone(),
                    vec![summand(v("v"), &[EdgeRef::member("e", 1)], 1)],
                ),
            ];
            for (g, s) in &specs {
                let n = normalize_projective_spec(g, s).unwrap();
                assert_equivalent(g, &spec_to_monoid(s), &spec_to_monoid(&n), 10);
            }
        },
    );
}

// ---------------------------------------------------------------------------
// 6. Restricted-groupoid corner identity
// ---------------------------------------------------------------------------

#[test]
fn criterion_6_corner_identity() {
    criterion(
        6,
        "restrict_basis matches the corner monomials exactly",
        || {
            let cases: Vec<(Graph, BTreeSet<VertexRef>)> = vec![
                (samples::parallel_pair(), [v("a")].into_iter().collect()),
                (samples::clock(), [v("v")].into_iter().collect()),
                (
                    samples::loop_with_exit(),
                    [v("u"), v("t")].into_iter().collect(),
                ),
                (
                    samples::double_fan(),
                    [v("v"), v("w")].into_iter().collect(),
                ),
            ];
            for (g, h) in &cases {
                let basis = restrict_basis(g, h, 3, 3).unwrap();
                for b in &basis {
                    let x = pi_inv(g, &SteinbergElement::indicator(b.clone())).unwrap();
                    let (_, inside) = lpa_core::corner_filter(&x, h);
                    assert!(inside, "basis element escapes the corner");
                }
                // Conversely every corner monomial of length <= 3 is listed.
                let listed: BTreeSet<Bisection> = basis.into_iter().collect();
                let paths = lpa_core::enumerate_paths(g, 3, 3).unwrap();
                let mut count = 0usize;
                for p in &paths {
                    for q in &paths {
                        if !h.contains(p.source()) || !h.contains(q.source()) {
                            continue;
                        }
                        if p.range(g).unwrap() != q.range(g).unwrap() {
                            continue;
                        }
                        let b = Bisection::new(g, p.clone(), q.clone()).unwrap();
                        assert!(listed.contains(&b), "missing corner monomial {p}({q})*");
                        count += 1;
                    }
                }
                assert_eq!(count, listed.len());
            }
        },
    );
}

// ---------------------------------------------------------------------------
// 7. C*-pipeline graph-level check
// ---------------------------------------------------------------------------

#[test]
fn criterion_7_cstar_pipeline() {
    criterion(7, "stabilized pipeline H and omega-heads", || {
        let g = samples::double_fan();
        let report = cstar_pipeline(&g, &fan_spec()).unwrap();
        assert_eq!(
            report.h,
            vec![
                v("v1"),
                VertexRef::member("v2_h", 1),
                VertexRef::member("v2_h", 2),
                v("v2"),
                v("w"),
            ]
        );
        // Every vertex of the split graph F carries an omega-head in SF.
        let f = cateiso_pipeline(&g, &normalize_projective_spec(&g, &fan_spec()).unwrap())
            .unwrap()
            .graph;
        for vertex in &f.vertices {
            let fam = format!("{vertex}_h");
            assert!(report.final_graph.vertex_families.contains(&fam));
            assert!(report
                .final_graph
                .edge_families
                .contains_key(&format!("{vertex}_he")));
        }
        for fam in &f.vertex_families {
            assert!(report.final_graph.stabilized_families.contains(fam));
        }

        // Trivial presentation on the clock: (SC, {v}).
        let clock = samples::clock();
        let trivial = vec![summand(v("v"), &[], 1)];
        let report = cstar_pipeline(&clock, &trivial).unwrap();
        assert_eq!(report.h, vec![v("v")]);
        assert!(report.final_graph.vertex_families.contains("v_h"));
        assert!(report.final_graph.edge_families.contains_key("v_he"));
        assert!(report.final_graph.stabilized_families.contains("w"));
    });
}

// ---------------------------------------------------------------------------
// 8. Rewriting robustness
// ---------------------------------------------------------------------------

fn max_finite_out_degree(g: &Graph) -> u64 {
    let mut best = 1;
    for vertex in lpa_core::bounded_vertices(g, 3) {
        if let Some(out) = g.regular_out_edges(&vertex).unwrap() {
            best = best.max(out.len() as u64);
        }
    }
    best
}

#[test]
fn criterion_8_rewriting_robustness() {
    criterion(
        8,
        "confluence under permutation; step bounds respected",
        || {
            let graphs = [
                samples::parallel_pair(),
                samples::clock(),
                samples::loop_with_exit(),
                samples::double_fan(),
            ];
            let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0008);
            for g in &graphs {
                let buckets = paths_by_range(g, 3, 3);
                let d = max_finite_out_degree(g);
                for _ in 0..200 {
                    let a = random_element(g, &buckets, &mut rng);
                    let (whole, steps) = normal_form_counted(g, &a).unwrap();
                    // Normalizing the terms one by one, in shuffled order, then
                    // summing must agree with the whole-element run.
                    let mut terms: Vec<(Monomial, Scalar)> =
                        a.terms().map(|(m, c)| (m.clone(), c.clone())).collect();
                    terms.shuffle(&mut rng);
                    let mut sum = LpaElement::zero();
                    for (m, c) in &terms {
                        let single = LpaElement::from_term(m.clone(), c.clone());
                        sum = sum.add(&normal_form(g, &single).unwrap());
                    }
                    assert_eq!(whole, nf(g, &sum));
                    // Worklist step bound.
                    let bound: u64 = a
                        .terms()
                        .map(|(m, _)| (m.p().len() + m.q().len()) as u64 * d)
                        .sum();
                    assert!(steps <= bound, "steps {steps} exceed bound {bound}");
                }
            }
        },
    );
}
