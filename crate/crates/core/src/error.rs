use thiserror::Error;

/// Errors raised by net construction and the analyses built on top of it.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("derivative order {requested} exceeds the net's maximal order {max}")]
    OrderOverflow { requested: usize, max: usize },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("data quality: {0}")]
    DataQuality(String),
    #[error("resolution: {0}")]
    Resolution(String),
    #[error("step size: {0}")]
    StepSize(String),
    #[error("overflow guard tripped: {0}")]
    Overflow(String),
    #[error("quadrature failure: {0}")]
    Quadrature(String),
    #[error("cutoff construction failed: {0}")]
    Cutoff(String),
    #[error("inconsistent strength: fiber radius {radius} is not within {tolerance} of an integer")]
    InconsistentStrength { radius: f64, tolerance: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
