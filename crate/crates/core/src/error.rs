use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    /// The Weyl system could not be factored reliably. Carries the
    /// 1-norm condition estimate (infinite for an exactly singular pivot).
    #[error("singular Weyl system ({detail}); condition estimate {condition:.3e}")]
    Singular { condition: f64, detail: String },
    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
