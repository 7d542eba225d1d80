use std::fmt;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A precondition on the inputs was violated.
    InvalidInput(String),
    /// The instance admits no feasible solution.
    Infeasible(String),
    /// A configured size cap was exceeded.
    CapExceeded(String),
    /// A construction produced an object violating its own invariants.
    Internal(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::Infeasible(msg) => write!(f, "infeasible: {msg}"),
            Error::CapExceeded(msg) => write!(f, "cap exceeded: {msg}"),
            Error::Internal(msg) => write!(f, "internal error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

pub(crate) fn infeasible(msg: impl Into<String>) -> Error {
    Error::Infeasible(msg.into())
}

pub(crate) fn cap(msg: impl Into<String>) -> Error {
    Error::CapExceeded(msg.into())
}

pub(crate) fn internal(msg: impl Into<String>) -> Error {
    Error::Internal(msg.into())
}
