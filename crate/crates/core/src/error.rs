use thiserror::Error;

/// Errors raised by graph construction, exact solvers, samplers and tests.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum WalkError {
    /// The graph or a vector attached to it has the wrong shape.
    #[error("structural error: {0}")]
    Structural(String),
    /// A caller-supplied parameter is outside its admissible range.
    #[error("parameter error: {0}")]
    Parameter(String),
    /// A special-function argument is outside its domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// The result is not representable in double precision.
    #[error("range error: {0}")]
    Range(String),
    /// A linear solve failed; `condition` is a 1-norm condition estimate when available.
    #[error("numerical error: {message} (condition estimate {condition:e})")]
    Numerical { message: String, condition: f64 },
    /// An exhaustive enumeration exceeded its configured cap.
    #[error("capacity error: {0}")]
    Capacity(String),
    /// A mathematical precondition of an identity does not hold on the input.
    #[error("precondition failed: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, WalkError>;
