use thiserror::Error;

/// Errors raised anywhere in the core library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DcgError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("index error: {0}")]
    Index(String),

    #[error("perturbation order {0} is not supported (orders 1 to 4 are)")]
    UnsupportedOrder(usize),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("malformed generator: {0}")]
    MalformedGenerator(String),

    #[error("degenerate rates: {0}")]
    DegenerateRates(String),

    #[error("bath model does not support this operation: {0}")]
    UnsupportedBath(String),
}

pub type Result<T> = std::result::Result<T, DcgError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(DcgError::Domain(msg.into()))
}

pub(crate) fn dimension<T>(msg: impl Into<String>) -> Result<T> {
    Err(DcgError::Dimension(msg.into()))
}
