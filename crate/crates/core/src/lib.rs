//! Poisson conformal algebras and their Lie pseudoalgebra generalisations, with
//! the operad of graph-indexed multilinear maps that controls their cohomology.

pub mod error;
pub mod graphs;
pub(crate) mod linalg;
pub mod hmodule;
pub mod hopf;
pub mod operad;
pub mod parse;
pub mod perm;
pub mod pseudoalg;
pub mod suites;

pub use error::{Error, Result};

/// Exact rational scalars.
pub type Q = num_rational::BigRational;

/// `n` as a rational.
pub fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}
