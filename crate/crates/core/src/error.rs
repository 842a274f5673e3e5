use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("alpha must lie in the open interval (1, 2), got {0}")]
    AlphaOutOfRange(f64),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    #[error("unknown experiment id `{0}`")]
    UnknownExperiment(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
