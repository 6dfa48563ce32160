use thiserror::Error;

/// Errors raised by the library.
///
/// `Domain` means the caller handed in something outside an operation's
/// contract (wrong lattice, bad position, non-lo class, ...). `Internal`
/// means a consistency check on computed data failed, which points at a
/// bug or at malformed built-in data rather than at the input. `Data`
/// means a reference data file is missing or unreadable.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error("data error: {0}")]
    Data(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn internal<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Internal(msg.into()))
}
