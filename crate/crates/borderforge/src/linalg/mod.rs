//! Exact elimination over F_p: the ordered reducer set, a linear-scan
//! reference eliminator and dense nullspace computation.

mod matrix;
mod reducer;

pub use matrix::{nullspace, MatrixFp};
pub use reducer::{reduce_full_naive, ElimStats, Lookup, ReducerSet};
