use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Input too large for an exhaustive routine.
    #[error("{what}: size {size} exceeds limit {limit}{hint}")]
    Size {
        what: &'static str,
        size: usize,
        limit: usize,
        hint: &'static str,
    },
    #[error("index {index} out of bounds for dimension {dim}")]
    Bounds { index: usize, dim: usize },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("budget exhausted: {0}")]
    Budget(String),
}

impl Error {
    pub(crate) fn size(what: &'static str, size: usize, limit: usize) -> Self {
        Error::Size {
            what,
            size,
            limit,
            hint: "",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
