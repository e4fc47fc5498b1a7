use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected length {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The observed signal cannot have been produced by the stated distortion.
    #[error("inconsistent observation at sample {index}: {reason}")]
    InconsistentObservation { index: usize, reason: String },

    #[error("operator is zero; Lipschitz constant and step size are undefined")]
    ZeroOperator,

    #[error("nested projection did not converge (primal residual {residual:.3e})")]
    ProjectionNotConverged { residual: f64 },

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, actual })
    }
}
