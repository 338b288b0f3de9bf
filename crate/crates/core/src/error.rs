use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty set")]
    EmptySet,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("threshold above reachable density")]
    ThresholdUnreachable,

    #[error("density {value} exceeds envelope {envelope}")]
    EnvelopeViolation { value: f64, envelope: f64 },

    #[error("non-monotone complex: simplex {index} has a face with a larger value")]
    NonMonotone { index: usize },

    #[error("incomparable essential classes")]
    IncomparableEssential,

    #[error("degenerate range")]
    DegenerateRange,

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("{failed} of {total} bootstrap replicates failed")]
    TooManyFailures { failed: usize, total: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
