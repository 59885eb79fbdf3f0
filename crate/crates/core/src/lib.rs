//! Exact signatures of quadratic and hermitian forms over real number fields
//! and algebras with involution.

pub mod algebra;
pub mod cones;
pub mod error;
pub mod field;
pub mod hermitian;
pub mod poly;
pub mod quadform;
pub mod sample;
pub mod spectra;

pub use error::{Error, Result};
pub use field::{four_square_decomposition, FieldElement, NumberField, Ordering};
pub use poly::Poly;

/// Reduced fraction of big integers with positive denominator.
pub type Rational = num_rational::BigRational;
