use std::fmt;

/// Errors reported by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid grid specification: {0}")]
    InvalidSpec(String),
    #[error("operation requires a {expected}D mesh, got {got}D")]
    UnsupportedDimension { expected: usize, got: usize },
    #[error("not representable on this mesh: {0}")]
    NotRepresentable(String),
    #[error("problem too large for the dense oracle: {size} > {cap}")]
    TooLarge { size: usize, cap: usize },
    #[error("inconsistent right-hand side: relative kernel component {0:.3e}")]
    Inconsistent(f64),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("catalog does not belong to this mesh")]
    MeshMismatch,
    #[error("index {index} out of range (len {len})")]
    OutOfRange { index: usize, len: usize },
    #[error("internal error: {0}")]
    Internal(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl fmt::Display) -> Error {
    Error::InvalidSpec(msg.to_string())
}
