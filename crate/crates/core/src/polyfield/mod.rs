//! Exact polynomial symmetric matrix fields `H: Rⁿ → S(m)` and their
//! derivative tensors.
//!
//! Entries are polynomials, so every derivative of `H` is computed
//! symbolically and then evaluated; no finite differencing happens here.

mod field;
mod polynomial;

pub use field::{builtin, FieldJet, PolyMatrixField};
pub use polynomial::{Monomial, Polynomial, COEFFICIENT_FLOOR};
