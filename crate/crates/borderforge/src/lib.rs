//! Border bases of zero-dimensional ideals over prime fields.
//!
//! The crate computes border bases with the classical and incremental border
//! basis algorithms, an oracle-guided variant with a bounded number of
//! predicted expansions, and a reducer set with logarithmic leading-term
//! lookup. It also samples border bases from points, produces generator sets
//! with the same ideal, and serializes training samples.

pub mod algebra;
pub mod bba;
pub mod bench;
pub mod datagen;
pub mod error;
pub mod linalg;
pub mod obba;
pub mod orderideal;
pub mod sampling;

pub use algebra::{FieldElement, Polynomial, PrimeField, Ring, Term, TermOrder};
pub use error::{Error, Result};
