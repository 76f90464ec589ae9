use thiserror::Error;

/// Errors raised by the library.
///
/// Variants fall into two families: [`Error::is_cap`] distinguishes the
/// resource caps (enumeration too large) from input validation failures.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("node index {index} out of range for graph with {n} nodes")]
    NodeOutOfRange { index: usize, n: usize },
    #[error("edge ({0}, {1}) is not in the graph")]
    EdgeNotInGraph(usize, usize),
    #[error("graph is not connected")]
    Disconnected,
    #[error("profile has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("enumeration cap exceeded: {what} is {got}, limit {limit}")]
    CapExceeded { what: &'static str, got: usize, limit: usize },
    #[error("numeric value too large for exact enumeration")]
    Overflow,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn is_cap(&self) -> bool {
        matches!(self, Error::CapExceeded { .. } | Error::Overflow)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
