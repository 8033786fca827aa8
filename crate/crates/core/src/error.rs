use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("time must be non-negative, got {0}")]
    NegativeTime(f64),

    #[error("integration step must be positive, got {0}")]
    InvalidStep(f64),

    #[error("rate must be non-negative and finite, got {0}")]
    InvalidRate(f64),

    #[error("operation requires a single-qubit channel")]
    NonQubitChannel,

    #[error("measurement effects must be projectors: {0}")]
    NonProjective(String),

    #[error("invalid measurement: {0}")]
    InvalidMeasurement(String),

    #[error("invalid assemblage: {0}")]
    InvalidAssemblage(String),

    #[error("Bloch vector must have unit length, got norm {0}")]
    NonUnitVector(f64),

    #[error("coupling strengths must be positive, got {0}")]
    InvalidCoupling(f64),

    #[error("invalid probabilities: {0}")]
    InvalidProbabilities(String),

    #[error("pseudo density matrix was not built from the maximally mixed state")]
    UnverifiedPdm,

    #[error("invalid semidefinite program: {0}")]
    InvalidProblem(String),

    #[error("solver did not reach optimality: {0}")]
    SolverFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
