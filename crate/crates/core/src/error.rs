use thiserror::Error;

/// Errors shared by every operator- and phase-level computation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension {dim} is too small (need at least {min})")]
    DimensionTooSmall { dim: usize, min: usize },

    #[error("dimension {dim} exceeds the dense-storage cap of {max}")]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("operands live in different bases (Fock vs grid)")]
    BasisMismatch,

    #[error("requested tolerance {requested:e} not reachable (achieved {achieved:e})")]
    Accuracy { requested: f64, achieved: f64 },

    #[error("truncation tail mass {tail_mass:e} exceeds tolerance {tolerance:e}; increase dim")]
    Truncation { tail_mass: f64, tolerance: f64 },

    #[error(
        "loop too coarse at segment {segment}: overlap modulus {overlap:.6} < {min:.2}; \
         increase the number of samples"
    )]
    LoopResolution {
        segment: usize,
        overlap: f64,
        min: f64,
    },

    #[error("invalid loop: {0}")]
    InvalidLoop(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("grid error: {0}")]
    Grid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
