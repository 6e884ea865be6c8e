use thiserror::Error;

/// Errors raised by the library.
///
/// The variants mirror the failure classes the command line maps onto exit
/// codes: bad input, violated preconditions, and exhausted budgets.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Malformed or inconsistent input.
    #[error("input error: {0}")]
    Input(String),
    /// A hypothesis of the checked statement does not hold for the input.
    #[error("precondition not met: {0}")]
    Precondition(String),
    /// The parameters fall in a regime the algorithm does not handle.
    #[error("unsupported parameters: {0}")]
    Unsupported(String),
    /// An enumeration or arithmetic budget was exceeded.
    #[error("resource cap exceeded: {0}")]
    Resource(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
    pub(crate) fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }
    pub(crate) fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }
}
