use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("integer overflow: {0}")]
    Overflow(String),

    #[error("out of supported range: {0}")]
    OutOfRange(String),

    #[error("point set is not dyadic: {0}")]
    NotDyadic(String),

    #[error("wrong domain: expected {expected}, found {found}")]
    WrongDomain {
        expected: &'static str,
        found: &'static str,
    },

    #[error("complexity guard exceeded: {0} (pass force to override)")]
    GuardExceeded(String),

    #[error("degenerate net: {0}")]
    DegenerateNet(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
