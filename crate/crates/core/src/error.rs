//! Error type shared by every module.

use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("solver did not converge after {iterations} iterations (best value {best_value:e})")]
    Solver {
        iterations: usize,
        best_value: f64,
        best_iterate: Vec<f64>,
    },

    /// The point lies in the subspace; `fallback` is some unit functional vanishing on it.
    #[error("dual certificate is degenerate: the point lies in the subspace")]
    DegenerateCertificate { fallback: Vec<f64> },

    #[error("rank deficiency: {0}")]
    Rank(String),

    #[error("trace fingerprint {expected} does not match the set fingerprint {found}")]
    StaleTrace { expected: String, found: String },

    #[error("outside the certified brute-force regime: {0}")]
    Regime(String),

    #[error("greedy step {0} has no dual certificate")]
    MissingCertificate(usize),

    #[error("orthonormal lift audit failed: {0}")]
    Lift(String),

    #[error("ellipsoid sandwich failed validation: {0}")]
    Sandwich(String),

    #[error("width premise not certified at n = {n}: {detail}")]
    Premise { n: usize, detail: String },

    #[error("proof trace check ({tag}) failed: {detail}")]
    TraceFailure { tag: String, detail: String },
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn dim(expected: usize, found: usize) -> Self {
        Error::Dimension { expected, found }
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::dim(expected, found))
    }
}
