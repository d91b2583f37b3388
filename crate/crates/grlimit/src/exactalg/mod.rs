//! Exact arithmetic: arbitrary-precision rationals, univariate polynomials
//! over them, and fraction-free polynomial-matrix algorithms (rank, minors,
//! minimal kernel bases) on which every geometric module is built.

mod matrix;
mod poly;
mod rat;
pub mod ratlin;

pub use matrix::{
    minimal_kernel_basis, minimal_kernel_basis_shifted, solve_polynomial, solve_rational,
    weighted_col_degree, PolyMatrix,
};
pub use poly::{poly_gcd, Poly};
pub use rat::Rat;
