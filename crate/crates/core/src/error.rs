use thiserror::Error;

/// Errors raised by the library. Each variant names the violated precondition.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A window or signal does not cover the range an operation needs.
    #[error("coverage error: {0}")]
    Coverage(String),

    /// An argument lies outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A request exceeds a configured size limit.
    #[error("resource error: {0}")]
    Resource(String),

    /// Sampled data is too coarse for the requested check.
    #[error("resolution error: {0}")]
    Resolution(String),

    /// Malformed input text.
    #[error("parse error (line {line}): {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn coverage(msg: impl Into<String>) -> Self {
        Error::Coverage(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }
}
