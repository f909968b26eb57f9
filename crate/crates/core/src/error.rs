use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid construction: {0}")]
    Construction(String),
    #[error("numerical overflow in {0}")]
    Overflow(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
