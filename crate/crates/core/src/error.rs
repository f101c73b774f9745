use thiserror::Error;

/// Everything that can go wrong in this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A point or interval lies outside the domain of a path or field.
    #[error("domain error: {0}")]
    Domain(String),

    /// A scalar argument lies outside its allowed range.
    #[error("argument error: {0}")]
    Argument(String),

    /// The exponent bundle violates an admissibility condition.
    #[error("regularity error: {0}")]
    Regularity(String),

    /// A sampled path does not satisfy the pinned-start hypothesis.
    #[error("hypothesis error: {0}")]
    Hypothesis(String),

    /// Malformed descriptor string.
    #[error("descriptor error: {0}")]
    Descriptor(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn arg_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}
