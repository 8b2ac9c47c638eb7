use thiserror::Error;

/// Errors raised anywhere in the laboratory.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("not a density matrix: {0}")]
    NotDensity(String),

    #[error("eigenvalue {0:e} lies outside the function domain [0, 1]")]
    OutsideDomain(f64),

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal mass {off:e})")]
    NoConvergence { sweeps: usize, off: f64 },

    #[error("channel output drifted out of the state space: {0}")]
    ChannelViolation(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
