//! Planar binary trees, loop graphs and a combinatorial model of topological
//! recursion built on the Loday-Ronco Hopf algebra.

pub mod checks;
pub mod ck;
pub mod error;
pub mod hopf;
pub mod io;
pub mod lincomb;
pub mod loops;
pub mod perm;
pub mod quantize;
pub mod toprec;
pub mod scalar;
pub mod tree;

pub use error::{AlgebraError, ParseError};
pub use lincomb::{LinComb, Tensor};
pub use perm::Perm;
pub use scalar::Scalar;
pub use tree::Tree;

/// Exact rational coefficients.
pub type Q = num_rational::BigRational;
