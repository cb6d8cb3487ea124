use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got} ({what})")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("{op} is singular at {at}")]
    Singular { op: &'static str, at: f64 },

    #[error("derivative order {0} outside the supported range")]
    UnsupportedOrder(usize),

    #[error("non-finite value encountered at step {step}")]
    NonFinite { step: usize },

    #[error("matrix is singular to working precision (pivot {pivot:e})")]
    SingularMatrix { pivot: f64 },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("point {step} left the chart domain")]
    ChartExit { step: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("line search failed after {0} halvings")]
    LineSearch(usize),

    #[error("did not converge: {0}")]
    NotConverged(String),

    #[error("logarithm failed for sample {index}: {reason}")]
    InnerLog { index: usize, reason: String },

    #[error("io: {0}")]
    Io(String),

    #[error("parse: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
