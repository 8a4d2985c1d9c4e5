//! Dense linear algebra: matrices, LU, GMRES, linear matrix equations, and the
//! rectangular inversion identities behind the compression recursions.

mod gmres;
mod index_sets;
mod kron;
mod lemma;
mod lu;
mod matrix;

pub use gmres::{gmres_solve, GmresError, GmresOutput, STAGNATION_FACTOR, STAGNATION_WINDOW};
pub use index_sets::IndexSets;
pub use kron::{kron_linear_solve, kron_residual};
pub use lemma::{lemma2_lhs, lemma2_rhs, lemma_lhs, lemma_rhs};
pub use lu::{condition_number_1, inverse, lu_solve, Lu, LuError};
pub use matrix::{norm2, rel_diff_vec, Matrix};
