//! q-analogues of Racah polynomials on the quadratic lattice `x(s) = [s][s+1]`
//! and the quantum-algebra 6j symbols built from them.

mod error;
pub mod nulattice;
pub mod qarith;
pub mod qhyper;
pub mod racah;
pub mod scalar;
pub mod sixj;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::{ExactField, ExactScalar, FloatField, FloatScalar, Monomial, QField, Scalar};

/// Exact rational numbers used for all lattice points and parameters.
pub type Rat = num_rational::Ratio<i64>;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/lattice.md")]
    mod lattice {}
    #[doc = include_str!("../../../book/src/polynomials.md")]
    mod polynomials {}
    #[doc = include_str!("../../../book/src/orthogonality.md")]
    mod orthogonality {}
    #[doc = include_str!("../../../book/src/sixj.md")]
    mod sixj {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
}
