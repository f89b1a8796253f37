use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("probability {0} outside [0,1]")]
    ProbabilityRange(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("enumeration cap exceeded: {bonds} bonds > cap {cap}")]
    CapExceeded { bonds: usize, cap: usize },

    #[error("truncation window too small: {0}")]
    TruncationTooSmall(String),

    #[error("boundary arc validation failed: {0}")]
    ArcValidation(String),

    #[error("config replay data invalid: {0}")]
    BadConfigData(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
