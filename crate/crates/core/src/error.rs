use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Operand shapes or subsystem layouts do not fit together.
    #[error("shape error: {0}")]
    Shape(String),

    /// An argument lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical object failed validation (non-Hermitian, not PSD, bad trace...).
    #[error("validation error: {0}")]
    Validation(String),

    /// Two independent routes to the same quantity disagree.
    #[error("internal consistency error: {0}")]
    Consistency(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
