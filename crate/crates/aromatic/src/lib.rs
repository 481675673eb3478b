//! Exact computer algebra for aromatic forests and aromatic forms.
//!
//! The objects are directed graphs whose components are rooted trees and
//! cycles of trees ("aromas"), graded by root count, covertex count and node
//! count.  On the alternating forms built from them the crate implements the
//! horizontal/vertical differentials, contraction by vector fields, Lie
//! derivatives, the interior Euler operator and variational derivative, a
//! grafting product and Lie bracket, an enveloping-algebra exponential with
//! the exact-flow series, exact rational linear algebra over graded slices,
//! symmetry/conservation-law machinery, and elementary differentials of
//! polynomial vector fields.  Everything is exact (arbitrary-precision
//! rationals) and deterministic.

pub mod calculus;
pub mod elemdiff;
pub mod envelope;
pub mod error;
pub mod forest;
pub mod form;
pub mod linalg;
pub mod noether;
pub mod textio;

pub use calculus::{
    bracket, contract, d_h, d_total, d_v, delta_v, graft, h_v, interior_euler, is_source_form, lie,
    lie_cartan, vertex_field,
};
pub use elemdiff::{
    divergence, elementary_differential, f_symmetry_check, sample_divfree, sample_poly_field,
    taylor_oracle, Differential, PolyVectorField, Polynomial,
};
pub use envelope::{
    exact_flow, exp_lie, lie_monomial, shuffle_coproduct, tree_density, tree_symmetry, Monomial,
    Series,
};
pub use error::{Error, Result, SourceSpan};
pub use forest::{enumerate_forests, permute, Forest, Grade, NodeKind, RawForest};
pub use form::{concat, rat, wedge_normalize, Form, GradedForm, Rational};
pub use linalg::{
    exactness_report, solve_horizontal, BasisSlice, ExactnessReport, ExactnessRow, GradedMatrix,
    OperatorTag,
};
pub use noether::{
    bracket_propagation_check, classify_symmetry, conservation_law, first_variational_split,
    is_solenoidal, modified_measure_check, noether_equivalence_check, solenoidal_basis,
    symmetry_descent_check, vp_modified_field, ModifiedFieldReport, SymmetryStatus,
    SymmetryVerdict,
};
pub use textio::{
    parse_expr, parse_form, parse_vector_field, print_forest, print_form, print_graded,
    print_rational,
};
