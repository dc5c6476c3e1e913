use thiserror::Error;

/// Errors raised by basis construction, model building and time evolution.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("not a permutation: {0}")]
    NotAPermutation(String),

    /// An operator annihilated the state, so there is nothing to normalize.
    #[error("zero vector: {0}")]
    ZeroVector(String),

    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    #[error("photon cutoff {cutoff} too small: at least {required} photons are reachable")]
    CutoffTooSmall { cutoff: usize, required: usize },

    /// An analytically built operator disagrees with its projection oracle.
    #[error(
        "model consistency: element ({row}, {col}) at t = {t}: built {built}, oracle {oracle} (|diff| = {diff:e})"
    )]
    ModelConsistency {
        row: String,
        col: String,
        t: f64,
        built: String,
        oracle: String,
        diff: f64,
    },

    #[error("basis not closed: leakage {leakage:e} exceeds {tolerance:e}")]
    BasisNotClosed { leakage: f64, tolerance: f64 },

    #[error("reachable basis did not close within {iterations} iterations (sizes {growth:?})")]
    NoFixpoint { iterations: usize, growth: Vec<usize> },

    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },

    #[error("density matrix lost positivity at t = {t}: smallest eigenvalue {eigenvalue:e}")]
    Positivity { t: f64, eigenvalue: f64 },

    #[error("step-halving check failed: |dF| = {delta:e} exceeds {tolerance:e}")]
    NotConverged { delta: f64, tolerance: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
