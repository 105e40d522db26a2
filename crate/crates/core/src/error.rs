//! Crate-wide error type.

use crate::sim::SimTrace;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A constructor received an out-of-range or non-finite parameter.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The pendulum height reached zero or below; the model is undefined there.
    #[error("singular pendulum height z_sc = {0}")]
    SingularHeight(f64),

    /// An iterative solver or matrix factorization failed.
    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// An operation was handed data it cannot work on (wrong length, too short, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The simulated state left the sanity envelope. The trace collected up to
    /// the failure instant is attached so callers can still inspect and save it.
    #[error("simulation diverged at t = {t} s")]
    Diverged { t: f64, trace: Box<SimTrace> },

    /// A scenario file could not be parsed or failed validation.
    #[error("scenario error: {0}")]
    Scenario(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
