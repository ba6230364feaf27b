use thiserror::Error;

/// Errors raised by the library. Every variant is a validation failure on
/// caller-supplied data; numerical routines themselves do not fail.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),

    #[error("parameter `{name}` out of range: {reason}")]
    OutOfRange { name: &'static str, reason: String },

    #[error("policy accepted at t={t} after already accepting at t={first}")]
    DoubleAccept { first: usize, t: usize },
}

impl Error {
    pub(crate) fn range(name: &'static str, reason: impl Into<String>) -> Self {
        Error::OutOfRange {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
