use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The operation is not defined for these parameters (e.g. a series
    /// that only converges for r > 1).
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// An iterative method ran out of budget before meeting its tolerance.
    #[error("no convergence: {0}")]
    NonConvergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}

pub(crate) fn non_convergence(msg: impl Into<String>) -> Error {
    Error::NonConvergence(msg.into())
}
