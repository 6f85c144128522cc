use thiserror::Error;

pub type Result<T, E = GmlError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GmlError {
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative method stopped before reaching its tolerance. Carries the
    /// best estimate it had.
    #[error("{what} did not converge (best estimate {estimate:e}, error estimate {error_estimate:e})")]
    Convergence {
        what: &'static str,
        estimate: f64,
        error_estimate: f64,
    },

    #[error("series diverges: {0}")]
    Divergence(String),

    #[error("argument out of supported range: {0}")]
    Range(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("matrix is not of full rank: {0}")]
    Rank(String),

    #[error("invalid index set: {0}")]
    Index(String),

    #[error("dimension {0} is not supported by this operation")]
    UnsupportedDimension(usize),

    #[error("internal error: {0}")]
    Internal(String),
}

impl GmlError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        GmlError::Domain(msg.into())
    }
}
