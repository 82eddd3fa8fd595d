//! Exact blow-down calculus for weighted dual graphs of surface
//! singularities, with an enumerator and classifier for log del Pezzo
//! surfaces of Picard rank two and Cartier index three with one singular
//! point.
//!
//! All arithmetic is exact. The linear algebra in [`linalg`] and
//! [`discrepancy`] is generic over [`scalar::ExactInt`]; the aliases below
//! fix the scalar used by the rest of the pipeline.

pub mod canon;
pub mod classifier;
pub mod cli;
pub mod contraction;
pub mod discrepancy;
pub mod enumerator;
pub mod error;
pub mod graph;
pub mod linalg;
pub mod refdata;
pub mod scalar;

/// Ring of intersection numbers and matrix entries used by the pipeline.
pub type Int = i128;
/// Exact rationals over [`Int`].
pub type Rational = num_rational::Ratio<Int>;
/// Arbitrary precision rationals for callers that need headroom.
pub type BigRational = num_rational::Ratio<num_bigint::BigInt>;
pub type Discrepancies = discrepancy::DiscrepancyVector<Int>;

pub use canon::{canonical_form, CanonicalKey};
pub use error::{Error, Result};
pub use graph::{IntersectionMatrix, WeightedDualGraph};
