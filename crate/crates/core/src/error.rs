use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum SimsigError {
    /// A parameter fell outside the range a routine is defined on,
    /// e.g. `epsilon > beta` or `beta >= 1/2`.
    #[error("constraint violation: {0}")]
    ConstraintViolation(String),

    /// Vector length too small to be meaningful (`n < 2`).
    #[error("degenerate size: n = {0}, need n >= 2")]
    DegenerateSize(usize),

    /// A mean-pair layout does not fit into a vector of length `n`.
    #[error("infeasible configuration: {0}")]
    ConfigInfeasible(String),

    /// Invalid numeric argument such as `tau <= 0` or `sigma <= 0`.
    #[error("domain error: {0}")]
    DomainError(String),

    /// One-sequence estimator given an `x` sequence, or a pair estimator missing one.
    #[error("arity mismatch: {0}")]
    ArityMismatch(&'static str),

    /// Paired inputs of unequal length.
    #[error("length mismatch: x has {x}, y has {y}")]
    LengthMismatch { x: usize, y: usize },

    /// An operation that needs at least one observation got none.
    #[error("empty input")]
    EmptyInput,

    /// Slope fitting needs at least two distinct sample sizes.
    #[error("insufficient points: {0}")]
    InsufficientPoints(String),

    /// Malformed CSV or config content.
    #[error("parse error: {0}")]
    ParseError(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, SimsigError>;
