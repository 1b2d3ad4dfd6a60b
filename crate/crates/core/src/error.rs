use thiserror::Error;

/// Errors raised anywhere in the laboratory. Variants carry enough context to
/// tell which module failed and, for time-stepping errors, when.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("transform: {message} on [{from}, {to}]")]
    Transform { message: String, from: f64, to: f64 },

    #[error("solver failed at t={time}: {message}")]
    Solver { time: f64, message: String },

    #[error("boundary Newton iteration did not converge at t={time} (residual {residual:e})")]
    Newton { time: f64, residual: f64 },

    #[error("tridiagonal solve failed: zero pivot at row {row}")]
    Tridiagonal { row: usize },

    #[error("extinction reached at t={time}: front gap {gap:e}")]
    Extinction { time: f64, gap: f64 },

    #[error("profile ≡ 0 within tolerance at t={time}")]
    ProfileZero { time: f64 },

    #[error("trace error: {0}")]
    Trace(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        LabError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for LabError {
    fn from(e: serde_json::Error) -> Self {
        LabError::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, LabError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(LabError::Validation(msg.into()))
}
