use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not hermitian (max entrywise deviation {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("matrix is not unitary (max entrywise deviation {defect:.3e})")]
    NotUnitary { defect: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("vector has (numerically) zero norm")]
    ZeroVector,

    #[error("state is not normalized (|norm^2 - 1| = {defect:.3e})")]
    NotNormalized { defect: f64 },

    #[error("not a density matrix: {0}")]
    NotDensity(String),

    #[error("invalid operator basis: {0}")]
    InvalidBasis(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("channel is not unital (defect {defect:.3e}); the inclusion check requires an identity resolution")]
    NotUnital { defect: f64 },

    #[error("tuple spans a trivial subspace (all traceless parts vanish)")]
    TrivialSpan,

    #[error("factorization rank {rank} is below the required {required}")]
    RankDeficient { rank: usize, required: usize },

    #[error("every Kraus operator annihilates the state")]
    AllTermsVanish,

    #[error("dense histograms support at most 3 axes, got {0}")]
    TooManyAxes(usize),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
