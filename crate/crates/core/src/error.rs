use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Malformed or inconsistent user input.
    #[error("input error: {0}")]
    Input(String),
    /// An operation was called outside its domain.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// The truncation order was too small for a stable answer.
    #[error("truncation too small: {0}")]
    Truncation(String),
    /// A search bound was exhausted.
    #[error("search bound exhausted: {0}")]
    Bound(String),
    /// The input lies outside what the pipeline handles (not an input error).
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// Internal consistency check failed.
    #[error("inconsistent data: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
