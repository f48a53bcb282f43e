//! Small standard graphs used throughout the test suites and benchmarks.

use crate::graph::{EdgeFamily, EdgeFamilyKind, Graph, VertexRef};

/// Two vertices `a`, `b` with parallel edges `x, y : a -> b`.
pub fn parallel_pair() -> Graph {
    let mut g = Graph::new();
    g.add_vertex("a").unwrap();
    g.add_vertex("b").unwrap();
    g.add_edge("x", VertexRef::concrete("a"), VertexRef::concrete("b"))
        .unwrap();
    g.add_edge("y", VertexRef::concrete("a"), VertexRef::concrete("b"))
        .unwrap();
    g
}

/// The infinite clock: one emitter `v`, sink family `w`, and a diagonal edge
/// family `e` with `e_n : v -> w_n`.
pub fn clock() -> Graph {
    let mut g = Graph::new();
    g.add_vertex("v").unwrap();
    g.add_vertex_family("w").unwrap();
    g.add_edge_family(
        "e",
        EdgeFamily::new(EdgeFamilyKind::Diagonal {
            source: "v".into(),
            family: "w".into(),
        }),
    )
    .unwrap();
    g
}

/// A single vertex `u` with one loop `c`.
pub fn single_loop() -> Graph {
    let mut g = Graph::new();
    g.add_vertex("u").unwrap();
    g.add_edge("c", VertexRef::concrete("u"), VertexRef::concrete("u"))
        .unwrap();
    g
}

/// A loop `c` at `u` plus an exit edge `d : u -> t` into a sink.
pub fn loop_with_exit() -> Graph {
    let mut g = Graph::new();
    g.add_vertex("t").unwrap();
    g.add_vertex("u").unwrap();
    g.add_edge("c", VertexRef::concrete("u"), VertexRef::concrete("u"))
        .unwrap();
    g.add_edge("d", VertexRef::concrete("u"), VertexRef::concrete("t"))
        .unwrap();
    g
}

/// Three vertices `v`, `w`, `u`: a loop `e` at `v`, infinitely many parallel
/// edges `f_n : v -> w`, and infinitely many parallel edges `g_n : w -> u`.
pub fn double_fan() -> Graph {
    let mut g = Graph::new();
    g.add_vertex("u").unwrap();
    g.add_vertex("v").unwrap();
    g.add_vertex("w").unwrap();
    g.add_edge("e", VertexRef::concrete("v"), VertexRef::concrete("v"))
        .unwrap();
    g.add_edge_family(
        "f",
        EdgeFamily::new(EdgeFamilyKind::Constant {
            source: "v".into(),
            range: VertexRef::concrete("w"),
        }),
    )
    .unwrap();
    g.add_edge_family(
        "g",
        EdgeFamily::new(EdgeFamilyKind::Constant {
            source: "w".into(),
            range: VertexRef::concrete("u"),
        }),
    )
    .unwrap();
    g
}
