//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors from state construction, network composition and analysis.
#[derive(Debug, Error)]
pub enum Error {
    /// A matrix or form did not have the expected dimensions.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// An operation needs more modes than the object provides.
    #[error("need >= {needed} modes, got {got}")]
    TooFewModes { needed: usize, got: usize },

    /// A mode index was outside `1..=modes`.
    #[error("mode index {mode} out of range for {modes} modes")]
    ModeOutOfRange { mode: usize, modes: usize },

    /// A two-mode element addressed the same mode twice.
    #[error("two-mode element addressed mode {0} twice")]
    DuplicateMode(usize),

    /// A matrix failed the unitarity check.
    #[error("matrix is not unitary (residual {residual:.3e}, tolerance {tolerance:.3e})")]
    NotUnitary { residual: f64, tolerance: f64 },

    /// A Bell-state index outside `1..=4`.
    #[error("Bell index {0} out of range 1..=4")]
    BellIndexOutOfRange(usize),

    /// Prior probabilities failed validation.
    #[error("invalid priors: {0}")]
    InvalidPriors(String),

    /// A preset name that the crate does not know.
    #[error("unknown preset {0:?} (available: bs-pbs, bs-pbs-hwp)")]
    UnknownPreset(String),

    /// An angle or amplitude was NaN or infinite.
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    /// A tolerance must be positive and finite.
    #[error("invalid tolerance {0}")]
    InvalidTolerance(f64),

    /// Mesh parameters did not match the canonical triangular layout.
    #[error("malformed mesh: {0}")]
    MalformedMesh(String),

    /// A zero state cannot be normalized.
    #[error("cannot normalize a zero form")]
    ZeroNorm,

    /// A numeric argument outside its documented range.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
