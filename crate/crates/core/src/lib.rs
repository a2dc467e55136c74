//! Rooted-tree representations of multiqubit states.
//!
//! A pure `n`-qubit state can be written as a rooted tree whose leaves are
//! single-qubit superpositions `α|0⟩ + β|1⟩`, whose internal vertices are
//! weighted `+` gates or ordered `⊗` gates, and whose *size* is the number of
//! leaves. This crate builds, validates, evaluates and transforms such trees,
//! and provides the explicit constructions and brute-force oracles needed to
//! verify their sizes and amplitudes at desk scale:
//!
//! - [`tree`] — the tree representation itself: validation, leaf counts,
//!   amplitude evaluation, invertible local operators at the leaves.
//! - [`formula`] — multilinear formulas computing the coefficient function of
//!   a state, obtained from trees by the `|0⟩ → 1−x`, `|1⟩ → x` substitution.
//! - [`states`] — benchmark states (GHZ, W, cluster chain) and the
//!   determinant / permanent / immanant families with their Laplace and
//!   Leibnitz tree decompositions.
//! - [`matrices`] — exact (0,1)-matrix oracles: determinant, permanent,
//!   immanant, nonsingular census, maximal determinant vs the Hadamard bound.
//! - [`mps`] — open-boundary matrix product states, contraction, and
//!   compilation to trees with `(2D)^(⌊log₂ n⌋+1)` leaves.
//! - [`circuit`] — state-vector simulation of the ancilla-measurement
//!   protocol that prepares immanant states for every outcome.
//! - [`analysis`] — symmetry eigenchecks, Schmidt ranks, product-expansion
//!   witnesses, heuristic tree-size minimization, persistency search.
//!
//! Conventions used across the crate: qubits are indexed `1..=n` and qubit 1
//! is the most significant bit of an amplitude index, so index `x` encodes
//! `|x₁x₂…x_n⟩`. States are unnormalized; comparisons are up to a global
//! factor via `|⟨a|b⟩| / (‖a‖‖b‖) ≥ 1 − tol`.

pub mod analysis;
pub mod circuit;
pub mod dense;
pub mod formula;
pub mod io;
pub mod matrices;
pub mod mps;
pub mod perm;
pub mod states;
pub mod tree;

pub use dense::{DenseState, LocalOp};
pub use formula::MultilinearFormula;
pub use matrices::ZeroOneMatrix;
pub use mps::Mps;
pub use perm::SignFunction;
pub use states::QubitGrid;
pub use tree::{StateTree, TreeNode};

use num_complex::Complex64;

/// Tolerance for proportional state comparisons.
pub const PROPORTIONAL_TOL: f64 = 1e-9;
/// A 2×2 operator is treated as singular when `|det|` falls at or below this.
pub const SINGULAR_TOL: f64 = 1e-12;
/// Branches with norm below this are pruned in recursive decompositions.
pub const PRUNE_TOL: f64 = 1e-12;

/// Errors shared by every module of the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid tree:\n{0}")]
    InvalidTree(tree::ValidationReport),
    #[error("singular local operator for qubit {qubit}: |det| = {det:.3e}")]
    SingularOperator { qubit: usize, det: f64 },
    #[error("qubit count must satisfy {constraint}, got {got}")]
    BadQubitCount { constraint: &'static str, got: usize },
    #[error("state is identically zero")]
    ZeroState,
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("{0}")]
    Parse(String),
    #[error("amplitude vector has length {got}, expected 2^{n} = {expected}")]
    BadAmplitudeLength { n: usize, got: usize, expected: usize },
    #[error("matrix product state is malformed: {0}")]
    BadMps(String),
    #[error("sign function is malformed: {0}")]
    BadSignFunction(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
