//! Prime fields, terms, term orders and sparse polynomials.

mod field;
mod poly;
mod term;

pub use field::{FieldElement, PrimeField};
pub use poly::{Polynomial, Ring};
pub use term::{Term, TermOrder, MAX_EXP, MAX_VARS};
