use thiserror::Error;

/// Errors raised by grid construction, sampling and verification.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied argument is outside its admissible range.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A numerical routine left its validity region.
    #[error("numerical failure at t = {t}: {reason}")]
    Numerical { t: f64, reason: String },

    /// Input data (e.g. a sample batch) violates a precondition.
    #[error("invalid data: {0}")]
    Data(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}
