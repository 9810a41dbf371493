use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("no convergence: {0}")]
    NonConvergence(String),

    #[error("syntax error at position {position}: found {found}, expected one of {expected:?}")]
    Syntax {
        position: usize,
        found: String,
        expected: Vec<String>,
    },

    #[error("validation failed: {0}")]
    Validation(String),
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
