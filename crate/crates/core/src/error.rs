use thiserror::Error;

/// Errors raised by rule construction, transforms and solution evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unsupported dimension {0}: only 1, 2 and 3 are supported")]
    Dimension(usize),

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("tolerance not met: achieved error estimate {estimate:e} (target {target:e})")]
    ToleranceNotMet { estimate: f64, target: f64 },

    #[error("rejected input: {0}")]
    RejectedInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn config<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Configuration(msg.into()))
}
