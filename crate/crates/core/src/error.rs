use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid fan: {0}")]
    InvalidFan(String),

    #[error("cone is not unimodular: {0}")]
    NotUnimodular(String),

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("unsupported cohomological index {index}: {hint}")]
    UnsupportedIndex { index: usize, hint: &'static str },

    #[error("not a cocycle: {0}")]
    NotCocycle(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("not certified: {0}")]
    NotCertified(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
