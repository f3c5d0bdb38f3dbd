//! Exact sparse linear algebra over any [`Scalar`](crate::Scalar) field.

mod echelon;
mod matrix;
mod vector;

pub use echelon::RankEchelon;
pub use echelon::{apply, membership, quotient_basis, QuotientSpace, Subspace};
pub use matrix::{Rref, SparseMatrix};
pub use vector::SparseVec;
