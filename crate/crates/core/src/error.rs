use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A symmetric positive-definite factorization broke down, even after
    /// jitter escalation. `pivot` is the offending (non-positive) pivot.
    #[error("matrix is not numerically positive definite (pivot {pivot:e} at row {row})")]
    NotPositiveDefinite { pivot: f64, row: usize },

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("difference covariance is degenerate (largest eigenvalue {lambda_max:e})")]
    DegenerateCovariance { lambda_max: f64 },

    #[error("hyperparameter fit failed at all {attempted} start points")]
    FitFailure { attempted: usize },

    #[error("input outside function domain: {0}")]
    Domain(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
