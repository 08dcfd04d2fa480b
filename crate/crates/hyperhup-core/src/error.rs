use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum HupError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("infeasible regime: {0}")]
    Infeasible(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("construction failed: {0}")]
    Construction(String),
}

pub type Result<T> = std::result::Result<T, HupError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(HupError::InvalidInput(msg.into()))
}
