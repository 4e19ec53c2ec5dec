//! Nil-clean decompositions of matrices over GF(2).
//!
//! A matrix `A` has a decomposition of index `k` when `A = P + Q` with
//! `P^2 = P` and `Q^k = 0`. This crate provides bit-packed GF(2) matrix
//! arithmetic, similarity invariants, a word-rewriting engine for identities
//! in `P` and `Q`, exhaustive and SAT-based searches, and certificates for
//! their results.
//!
//! The matrix `C` (the companion matrix of `t^4 + t^3 + 1`) decomposes with
//! index four but not three, and [`search::theorem_check`] reproduces the
//! index-three impossibility for odd direct sums of `C` at `m = 1`.

pub mod error;
pub mod matrix;
pub mod nc;
pub mod poly;
pub mod report;
pub mod sat;
pub mod search;
pub mod similarity;

pub use error::{CertError, MatrixError, PolyError, SatError, SearchError};
pub use matrix::{Block, BlockSplit, Gf2Matrix};
pub use nc::{derive_eq1, derive_identity, expand_sum_power, Letter, NcPoly, NcWord, RuleSet};
pub use poly::{irreducibles_up_to, Gf2Poly};
pub use report::{verify_decomposition, Certificate, Decomposition, SearchReport, SearchStatus, Strategy};
pub use sat::{dpll_solve, encode, parse_solver_output, Assignment, CnfInstance, SolveMode, SolveResult, SolverAnswer};
pub use search::{
    block_identity_check, decompose, idempotent_count_formula, iter_idempotents, parity_audit, survey, theorem_check,
    SearchOptions,
};
pub use similarity::{
    enumerate_similarity_classes, frobenius_form, invariant_factors, is_similar, minimal_polynomial, SimilarityClass,
};

/// Crate version recorded in certificates.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// `t^4 + t^3 + 1`, the minimal polynomial of `C`.
pub fn c_polynomial() -> Gf2Poly {
    Gf2Poly::from_exponents(&[4, 3, 0])
}
