use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("denominator: prime {0} divides the denominator of u")]
    Denominator(String),
    #[error("truncation too small: need order {required}, got {got}")]
    Truncation { required: usize, got: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("consistency check failed: {0}")]
    Consistency(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("pole: {0}")]
    Pole(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
