use thiserror::Error;

/// Errors raised by geometry construction, special-function evaluation and the solvers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("unsupported geometry: {0}")]
    UnsupportedGeometry(String),
    #[error("point is the preimage of infinity")]
    PoleAtInfinity,
    #[error("point coincides with the interior pole of the annulus map")]
    PoleInDisc,
    #[error("series did not reach tolerance within {terms} terms")]
    ConvergenceFailure { terms: usize },
    #[error("point outside the closed exterior domain: {0}")]
    DomainViolation(String),
    #[error("underdetermined system: {0}")]
    UnderdeterminedSystem(String),
    #[error("least-squares system is numerically zero")]
    DegenerateSystem,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
