use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("sampling produced a non-finite value at {point}")]
    Sampling { point: String },

    #[error("malformed field file: {0}")]
    Format(String),

    #[error("symbol evaluation failed: {0}")]
    Evaluation(String),

    #[error("decomposition failed: {0}")]
    Decomposition(String),

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}
