use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("regime mismatch: {0}")]
    RegimeMismatch(String),
    #[error("degenerate bound: {0}")]
    DegenerateBound(String),
    #[error("size cap exceeded: {0}")]
    CapExceeded(String),
    #[error("malformed encoding: {0}")]
    MalformedEncoding(String),
    #[error("invalid triangulation: {0}")]
    InvalidTriangulation(String),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("support mismatch: {0}")]
    SupportMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
