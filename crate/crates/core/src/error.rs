use thiserror::Error;

/// Errors surfaced by the series, expansion and numeric layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("series with constant term {0} is not invertible over the integers")]
    NonInvertible(String),

    #[error("insufficient order: {0}")]
    InsufficientOrder(String),

    /// A pivot or leading coefficient that must be a unit was not.
    #[error("structural error: {0}")]
    Structural(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("singular derivative: {0}")]
    SingularDerivative(String),
}

pub type Result<T> = std::result::Result<T, Error>;
