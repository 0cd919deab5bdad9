use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Caller supplied arguments outside an operation's domain.
    #[error("usage error: {0}")]
    Usage(String),

    /// A value that should satisfy a structural invariant does not.
    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    /// An iterative method hit its iteration cap.
    #[error("numerical error: {message} (last iterate {last_iterate:e})")]
    Numerical { message: String, last_iterate: f64 },

    #[error("overflow: {0}")]
    Overflow(String),
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn invariant(msg: impl Into<String>) -> Self {
        Error::InvariantViolation(msg.into())
    }
}
