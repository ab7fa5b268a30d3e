use thiserror::Error;

/// Failures surfaced by the library.
///
/// `Domain` and `Contract` are caller errors (bad parameters, malformed
/// inputs); `Convergence` and `Numeric` are numerical failures that must not
/// be silently papered over.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("size out of range: {0}")]
    Size(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("contract violated: {0}")]
    Contract(String),
    #[error("no convergence: {0}")]
    Convergence(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    /// True for errors caused by invalid input rather than numerics.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Size(_) | Error::Domain(_) | Error::Contract(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
