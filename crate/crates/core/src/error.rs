use thiserror::Error;

#[derive(Debug, Error)]
pub enum WahtorError {
    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("capability exceeded: {0}")]
    Capability(String),

    #[error("numerical consistency check failed: {0}")]
    NumericalConsistency(String),

    #[error("non-finite objective value: {0}")]
    NonFinite(String),
}

pub type Result<T> = std::result::Result<T, WahtorError>;

impl WahtorError {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        WahtorError::Parse {
            line,
            message: message.into(),
        }
    }
}
