use thiserror::Error;

use crate::lp::LpError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymqError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("cannot parse function spec: {0}")]
    Parse(String),
    #[error("weight {0} is outside the promise")]
    OutsidePromise(usize),
    #[error("function is not even")]
    NotEven,
    #[error("out of regime: {0}")]
    OutOfRegime(String),
    #[error("linear program failed: {0}")]
    Lp(#[from] LpError),
}

pub type Result<T> = std::result::Result<T, SymqError>;

pub(crate) fn invalid(msg: impl Into<String>) -> SymqError {
    SymqError::InvalidParameter(msg.into())
}
