use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A field or parameter contained NaN or infinite values.
    #[error("non-finite value in {context} (first offense at index {index})")]
    NonFinite { context: &'static str, index: usize },

    /// Spectral coefficients violate Hermitian symmetry beyond tolerance.
    #[error("Hermitian symmetry violated: max deviation {max_dev:.3e} exceeds {tol:.3e} (relative)")]
    SymmetryViolation { max_dev: f64, tol: f64 },

    /// Two fields or multipliers live on different grids.
    #[error("grid mismatch: {left} vs {right} points")]
    GridMismatch { left: usize, right: usize },

    /// A constructor argument violates its contract.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Initial data is not resolved on the requested grid.
    #[error("under-resolved data: spectral tail {tail:.3e} exceeds {limit:.3e} of peak")]
    UnderResolved { tail: f64, limit: f64 },

    /// The solution left the trusted range; the run is aborted.
    #[error("solution blow-up at t = {t:.6}: |u|_inf = {linf:.3e}")]
    BlowUp { t: f64, linf: f64 },

    /// A time record is too short for the requested analysis.
    #[error("too few time samples: got {got}, need at least {need}")]
    TooFewSamples { got: usize, need: usize },

    /// A trajectory file failed to parse.
    #[error("malformed trajectory file: {0}")]
    BadTrajectoryFile(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
