//! CLI acceptance: deterministic reports and print/parse round trips.

use std::collections::BTreeMap;
use std::fs;
use std::panic::{catch_unwind, resume_unwind, AssertUnwindSafe};

use lpa_cli::run_command;
use lpa_core::{
    parse_element, print_element, samples, Graph, LpaElement, Monomial, Path, Scalar, VertexRef,
};
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

const CLOCK: &str = "VERTICES\nv\nVERTEX_FAMILIES\nw\nEDGE_FAMILIES\ne: v -> w\n";
const T2: &str = "VERTICES\na\nb\nEDGES\nx: a -> b\ny: a -> b\n";
const FAN: &str = "VERTICES\nu\nv\nw\nEDGES\ne: v -> v\nEDGE_FAMILIES\nf: v -> w\ng: w -> u\n";
const FAN_SPEC: &str = "1 (v; {e})\n1 (v; {f[1]})\n";

fn run_twice(argv: &[&str]) -> (i32, String) {
    let first = run_command(argv);
    let second = run_command(argv);
    assert_eq!(first.code, second.code, "exit codes differ across reruns");
    assert_eq!(
        first.report, second.report,
        "reports differ across reruns for {argv:?}"
    );
    (first.code, first.report)
}

fn random_element(g: &Graph, buckets: &[Vec<Path>], rng: &mut ChaCha8Rng) -> LpaElement {
    let mut out = LpaElement::zero();
    for _ in 0..rng.gen_range(1..=4usize) {
        let bucket = &buckets[rng.gen_range(0..buckets.len())];
        let p = bucket[rng.gen_range(0..bucket.len())].clone();
        let q = bucket[rng.gen_range(0..bucket.len())].clone();
        let c = Scalar::new(
            rng.gen_range(-6i64..=6).into(),
            rng.gen_range(1i64..=4).into(),
        );
        if !num::Zero::is_zero(&c) {
            out.add_term(Monomial::new(g, p, q).unwrap(), c);
        }
    }
    out
}

fn paths_by_range(g: &Graph) -> Vec<Vec<Path>> {
    let mut by_range: BTreeMap<VertexRef, Vec<Path>> = BTreeMap::new();
    for p in lpa_core::enumerate_paths(g, 3, 3).unwrap() {
        by_range.entry(p.range(g).unwrap()).or_default().push(p);
    }
    by_range.into_values().collect()
}

#[test]
fn criterion_9_cli_contract() {
    criterion(9, "byte-identical reruns; print/parse round trips", || {
        let dir = tempfile::tempdir().unwrap();
        let path = |name: &str, contents: &str| {
            let p = dir.path().join(name);
            fs::write(&p, contents).unwrap();
            p.to_str().unwrap().to_string()
        };
        let clock = path("clock.graph", CLOCK);
        let t2 = path("t2.graph", T2);
        let fan = path("fan.graph", FAN);
        let spec = path("spec.txt", FAN_SPEC);

        let (code, report) = run_twice(&["nf", &t2, "x.x^ + y.y^"]);
        assert_eq!(code, 0);
        assert_eq!(report, "a\n");

        let (code, report) = run_twice(&[
            "monoid-eq",
            &clock,
            "v",
            "w[1] + q(v;{e[1]})",
            "--depth",
            "3",
        ]);
        assert_eq!(code, 0);
        assert!(report.starts_with("Yes\n"), "got: {report}");

        let (code, report) = run_twice(&["pipeline-end", &fan, &spec]);
        assert_eq!(code, 0);
        assert!(
            report.contains("H = {v1, v2_2, v2_1, v2, w}"),
            "got: {report}"
        );
        assert!(report.contains("shape: 5x5"), "got: {report}");

        // Print/parse round trip on 100 random elements per graph.
        let graphs = [
            samples::parallel_pair(),
            samples::clock(),
            samples::double_fan(),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0009);
        for g in &graphs {
            let buckets = paths_by_range(g);
            for _ in 0..100 {
                let a = random_element(g, &buckets, &mut rng);
                if a.is_zero() {
                    continue;
                }
                let text = print_element(&a);
                let back = parse_element(&text, g).unwrap();
                assert_eq!(a, back, "through `{text}`");
            }
        }
    });
}
