use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("configuration error: {0}")]
    Configuration(String),
    #[error("scaling violation: {0}")]
    Scaling(String),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("optimization error: {0}")]
    Optimization(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
