use thiserror::Error;

/// Errors produced by the numerical engine and the verification harnesses.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("non-integrable data: {0}")]
    NonIntegrable(String),

    /// An integral that does not converge, with the location where the
    /// divergence was detected.
    #[error("divergent integral near {at}: {reason}")]
    Divergent { at: f64, reason: String },

    #[error("non-finite value at {at}")]
    NonFinite { at: f64 },

    #[error("branch tracking failed between {from} and {to}")]
    BranchTracking { from: String, to: String },

    #[error("refused: {0}")]
    Precondition(String),

    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("inconsistent data: {0}")]
    Inconsistent(String),

    #[error("input error: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
