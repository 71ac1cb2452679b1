//! Error type shared by every module.

use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("singular parameter: {0}")]
    SingularParameter(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("numerical degeneracy: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
