//! Exact integer-polynomial arithmetic.

pub mod cyclotomic;
pub mod factor;
pub mod modp;
pub mod parse;
pub mod poly;
pub mod resultant;

pub use cyclotomic::{cyclotomic, euler_phi, root_of_unity_order};
pub use factor::{factor, is_irreducible, Factorization};
pub use parse::{parse_poly, parse_quotient};
pub use poly::Poly;
pub use resultant::{discriminant, resultant};
