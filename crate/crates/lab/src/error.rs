use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("config error: {0}")]
    Config(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("numeric failure: {0}")]
    Numeric(#[from] nullcurve::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl LabError {
    /// Process exit code: 1 verification failure, 2 usage/config, 3 numeric failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Verification(_) => 1,
            LabError::Config(_) | LabError::Usage(_) | LabError::Io(_) => 2,
            LabError::Numeric(_) => 3,
        }
    }
}

pub type LabResult<T> = Result<T, LabError>;
