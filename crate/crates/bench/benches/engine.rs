use std::collections::BTreeMap;

use criterion::{criterion_group, criterion_main, Criterion};
use lpa_core::{
    convolve, end_pipeline, mul, normal_form, pi_map, samples, Graph, LpaElement, Monomial, Path,
    ProjectiveSummand, Scalar, VertexRef,
};

fn dense_element(g: &Graph) -> LpaElement {
    let mut by_range: BTreeMap<VertexRef, Vec<Path>> = BTreeMap::new();
    for p in lpa_core::enumerate_paths(g, 4, 4).unwrap() {
        by_range.entry(p.range(g).unwrap()).or_default().push(p);
    }
    let mut out = LpaElement::zero();
    let mut sign = 1i64;
    for bucket in by_range.values() {
        for p in bucket {
            for q in bucket {
                out.add_term(
                    Monomial::new(g, p.clone(), q.clone()).unwrap(),
                    Scalar::from_integer(sign.into()),
                );
                sign = -sign;
            }
        }
    }
    out
}

fn bench_normal_form(c: &mut Criterion) {
    let g = samples::double_fan();
    let a = dense_element(&g);
    let b = dense_element(&g);
    let product = mul(&g, &a, &b).unwrap();
    c.bench_function("normal_form/double_fan_dense", |bench| {
        bench.iter(|| normal_form(&g, &product).unwrap())
    });
}

fn bench_convolve(c: &mut Criterion) {
    let g = samples::loop_with_exit();
    let f = pi_map(&dense_element(&g));
    let h = pi_map(&dense_element(&g));
    c.bench_function("convolve/loop_with_exit_dense", |bench| {
        bench.iter(|| convolve(&g, &f, &h).unwrap())
    });
}

fn bench_end_pipeline(c: &mut Criterion) {
    let g = samples::double_fan();
    let spec = vec![
        ProjectiveSummand {
            vertex: VertexRef::concrete("v"),
            edges: [
                lpa_core::EdgeRef::concrete("e"),
                lpa_core::EdgeRef::member("f", 1),
            ]
            .into_iter()
            .collect(),
            mult: 2,
        },
        ProjectiveSummand {
            vertex: VertexRef::concrete("w"),
            edges: Default::default(),
            mult: 3,
        },
    ];
    c.bench_function("end_pipeline/double_fan", |bench| {
        bench.iter(|| end_pipeline(&g, &spec).unwrap())
    });
}

criterion_group!(
    benches,
    bench_normal_form,
    bench_convolve,
    bench_end_pipeline
);
criterion_main!(benches);
