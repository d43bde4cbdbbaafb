use alloc::string::String;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("mode mismatch: {0}")]
    ModeMismatch(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("out of range: {0}")]
    OutOfRange(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
