use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimensions: {0}")]
    Dimension(String),
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("channel Gram matrix is singular or ill-conditioned (condition estimate {0:.3e})")]
    SingularChannel(f64),
    #[error("channel row {0} is identically zero")]
    DegenerateChannel(usize),
    #[error("degenerate allocation: {0}")]
    Degenerate(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
