//! Locality, logical and strong nonlocality, and Hardy paradoxes in Bell
//! scenarios.
//!
//! Models are generic over the probability scalar: `f64`, `f32` or the
//! exact [`Rational`]. The aliases below cover the common cases.

pub mod catalog;
pub mod error;
pub mod format;
pub mod hardy;
pub mod localdecide;
pub mod quantum;
pub mod scalar;
pub mod tables;

pub use error::{Error, Result};
pub use scalar::{RealScalar, Scalar};

/// Exact probabilities.
pub type Rational = num_rational::BigRational;
pub type ExactModel = tables::ProbabilityModel<Rational>;
pub type FloatModel = tables::ProbabilityModel<f64>;
