use thiserror::Error;

/// Errors produced by the simulation and analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The caller violated a precondition (shape mismatch, bad index, ...).
    #[error("usage error: {0}")]
    Usage(String),
    /// The parameters fall outside the regime where the analysis applies.
    #[error("regime error: {0}")]
    Regime(String),
    /// A numerical failure while integrating a trajectory.
    #[error("non-finite drift at site {site}: {message}")]
    NonFiniteDrift { site: usize, message: String },
    /// A numerical cross-check failed.
    #[error("oracle mismatch: {0}")]
    Oracle(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Usage(msg.into()))
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
