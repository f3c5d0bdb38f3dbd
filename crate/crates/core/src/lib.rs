//! Exact computations with free, free nilpotent and finite-dimensional Lie
//! algebras: Chevalley–Eilenberg homology, finite presentations, and
//! subdirect sums and fibre products of nilpotent quotients.
//!
//! All algebra is generic over [`Scalar`]; [`Rational`] and [`Fp`] are the
//! two provided fields.

pub mod error;
pub mod fibre;
pub mod findim;
pub mod free_lie;
pub mod homology;
pub mod linalg;
pub mod presentations;
pub mod scalar;
pub mod subdirect;

pub use error::{Error, Result};
pub use scalar::{parse_literal, FieldDescriptor, Fp, PrimeField, RationalField, Scalar, DEFAULT_PRIME};

/// Arbitrary-precision rationals.
pub type Rational = num_rational::BigRational;

pub type QFreeLie = free_lie::FreeLieAlgebra<Rational>;
pub type FpFreeLie = free_lie::FreeLieAlgebra<Fp>;
pub type QLie = findim::FinDimLie<Rational>;
pub type FpLie = findim::FinDimLie<Fp>;
