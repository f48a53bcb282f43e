//! Exact symbolic computation for Leavitt path algebras of directed graphs
//! (possibly with infinite emitters), together with the associated graph
//! monoid, boundary-path-space set calculus, Steinberg-algebra convolution,
//! and the out-splitting / head-attachment / stabilization pipelines.
//!
//! All arithmetic is exact (arbitrary-precision rationals); every operation
//! is a pure function over immutable values.

pub mod error;
pub mod graph;
pub mod lpa;
pub mod monoid;
pub mod path_space;
pub mod samples;
pub mod steinberg;
pub mod text;
pub mod transforms;

pub use error::{LpaError, Result};
pub use graph::{
    check_ck_morphism, compose_paths, CkVerdict, ConcreteEdge, EdgeFamily, EdgeFamilyKind, EdgeRef,
    Graph, GraphMorphism, Path, VertexClass, VertexRef,
};
pub use lpa::{
    corner_filter, graded_components, mul, mul_monomial, normal_form, normal_form_counted,
    special_edge, star, LpaElement, Monomial, Scalar,
};
pub use monoid::{
    assemble_universe, audit_witness, equivalent, normalize_projective_spec, reduce_once,
    spec_to_monoid, validate_spec, Equivalence, MonoidElement, MonoidGen, ProjectiveSpec,
    ProjectiveSummand, Universe, Witness,
};
pub use path_space::{
    bounded_vertices, cylinder_meet, enumerate_paths, in_xe, normalize_basic_set, point_in_z,
    sample_boundary_points, BasicSet, BoundaryPoint, CylinderMeet, CylinderSpec,
};
pub use steinberg::{
    bisection_product, compose_points, convolve, convolve_pointwise, evaluate, pi_inv, pi_map,
    restrict_basis, Bisection, GroupoidPoint, SteinbergElement,
};
pub use text::{
    parse_element, parse_graph, parse_monoid_element, parse_path, parse_spec, print_element,
    print_graph, print_spec,
};
pub use transforms::{
    attach_heads, cateiso_pipeline, cstar_pipeline, end_pipeline, out_split, phi_conjugate,
    stabilize, transform_summand, CateisoResult, HeadsResult, OutSplitResult, PipelineKind,
    PipelineReport, StabilizeResult,
};
