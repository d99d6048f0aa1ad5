//! Exact computations around the absolute logarithmic Weil height: certified
//! heights of algebraic numbers, complete enumeration of bounded-height sets,
//! abelian number fields via Dirichlet characters, discriminant towers, and
//! preperiodic points of rational maps over the rationals.
//!
//! Polynomial arithmetic is generic over the coefficient ring; the concrete
//! aliases below are the types used throughout.

pub mod abelian_fields;
pub mod dynamics;
pub mod error;
pub mod heights;
pub mod northcott;
pub mod polycore;
pub mod primes;
pub mod towers;

pub use error::{Error, Result};

/// Integer polynomials: minimal polynomials and map components.
pub type IntPoly = polycore::Poly<num_bigint::BigInt>;
/// Polynomials over the rationals.
pub type RatPoly = polycore::Poly<num_rational::BigRational>;
