use thiserror::Error;

/// Errors raised by the measure, process and oracle layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A point or set falls outside the domain, or a jump lies outside its family's support.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// The operation is only defined for a narrower parameter class (e.g. constant concentration).
    #[error("unsupported parameters: {0}")]
    Unsupported(String),

    #[error("invalid prior draw: {0}")]
    InvalidPrior(String),

    #[error("oracle did not converge: {0}")]
    Oracle(String),

    #[error("need at least {need} samples, got {got}")]
    InsufficientSamples { need: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
