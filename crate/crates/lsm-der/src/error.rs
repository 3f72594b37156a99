//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on an operation argument was violated.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A statistic was requested on data that cannot define it
    /// (e.g. a mean inter-spike interval with zero spikes).
    #[error("undefined statistic: {0}")]
    UndefinedStatistic(String),

    /// A configuration file or value could not be interpreted.
    #[error("config error: {0}")]
    Config(String),

    /// A data file did not match its documented format.
    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
