//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("chart domain exit at t = {t}")]
    ChartDomain { t: f64 },

    #[error("representative singular: chi = 0 (pole of the projective parameter)")]
    RepresentativeSingular,

    #[error("degenerate representative: g(v,v) = 0")]
    DegenerateRepresentative,

    #[error("Moebius pole: c*tau + d = 0")]
    MobiusPole,

    #[error("invalid conformal factor: omega must be positive, got {0}")]
    InvalidConformalFactor(f64),

    #[error("infeasible data: {0}")]
    Infeasible(String),

    #[error("no such solution: {0}")]
    Nonexistence(String),

    #[error("singular parametrization at gamma^2 = 1 (gamma = {gamma})")]
    SingularParametrization { gamma: f64 },

    #[error("degenerate Killing vector: |K| = 0 at the requested point")]
    DegenerateKilling,

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
