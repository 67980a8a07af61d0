//! Exact and numeric refined-inertia engine.

pub mod charpoly;
pub mod inertia;
pub mod matrix;
pub mod poly;

pub use charpoly::{char_poly, char_poly_with, CharPolyMethod};
pub use inertia::{
    arrow_shift_det, classify_eigenvalues, count_eigen_re_leq, count_roots_in_strip,
    count_roots_re_below, numeric_eigenvalues, refined_inertia_exact, refined_inertia_numeric,
    refined_inertia_of, relative_axis_distance, NumericTolerance, RefinedInertia,
};
pub use matrix::{max_row_sum_f64, MatrixInput, QMatrix};
pub use poly::RationalPoly;
