use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid moments (m2 = {m2}, m4 = {m4}): {reason}")]
    InvalidMoments { m2: f64, m4: f64, reason: &'static str },

    #[error("invalid bound parameters: {0}")]
    InvalidBound(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("no threshold crossing found")]
    NoThreshold,

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
