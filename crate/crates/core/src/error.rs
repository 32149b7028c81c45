use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),

    #[error("singular hypergeometric parameter: {0}")]
    SingularParameter(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("iteration limit reached: {0}")]
    IterationLimit(String),

    #[error("degenerate series: {0}")]
    DegenerateSeries(String),

    #[error("series evaluated outside its radius of convergence: {0}")]
    OutOfRadius(String),

    #[error("internal cross-check failed: {0}")]
    CrossCheck(String),
}

pub type Result<T> = std::result::Result<T, Error>;
