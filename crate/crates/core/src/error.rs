use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid set: {0}")]
    InvalidSet(String),
    #[error("operation requires a non-empty set")]
    EmptySet,
    #[error("index {index} is outside the sequence domain (offset {offset})")]
    Index { index: usize, offset: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("parameter error: {0}")]
    Param(String),
    #[error("index map is not strictly increasing at n = {0}")]
    InvalidMap(usize),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("witnesses do not bracket the target {0}")]
    Bracket(f64),
    #[error("search did not converge after {0} iterations")]
    SearchFailure(usize),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
