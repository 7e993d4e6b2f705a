use thiserror::Error;

/// Errors raised by the estimators, the asymptotic constants and the samplers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty sample")]
    EmptySample,

    #[error("invalid observation at index {index}: {reason}")]
    InvalidObservation { index: usize, reason: String },

    #[error("k = {k} out of range for a sample of size {n} (need 1 <= k <= n - 1)")]
    KOutOfRange { k: usize, n: usize },

    #[error("index i = {i} out of range for window k = {k}")]
    IndexOutOfRange { i: usize, k: usize },

    #[error("zero threshold")]
    ZeroThreshold,

    #[error("zero Hill estimate: all top log-excesses vanish")]
    ZeroHill,

    #[error("all top observations censored")]
    AllCensored,

    #[error("KM threshold mass exhausted")]
    KmThresholdExhausted,

    #[error("no root exists: every weight in the top window is zero")]
    NoRootExists,

    /// The scan found no sign change of the residual. `grid` holds the
    /// scanned `(gamma1, residual)` pairs.
    #[error("no root in bracket [{lo}, {hi}]")]
    NoRootInBracket {
        lo: f64,
        hi: f64,
        grid: Vec<(f64, f64)>,
    },

    #[error("root solver stopped after {iterations} iterations with |residual| = {residual:e}")]
    SolverNotConverged { iterations: usize, residual: f64 },

    #[error("variance formula requires p > 1/2 (got p = {0})")]
    VarianceRequiresP(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quadrature did not reach tolerance: estimate {value:e}, error {error:e}")]
    Quadrature { value: f64, error: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
