use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (max |A - A†| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not unitary (max |U†U - I| = {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("invalid value for `{key}`: {reason}")]
    InvalidInput { key: String, reason: String },

    /// The first argument has weight outside the support of the second.
    #[error(
        "relative entropy diverges: weight {weight:e} outside the support of the reference state"
    )]
    DivergentRelativeEntropy { weight: f64 },

    #[error("zero temperature: 1/T diverges")]
    ZeroTemperature,

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    EigNoConvergence { sweeps: usize, off_norm: f64 },

    #[error("phonon fit did not converge after {iterations} iterations")]
    FitNoConvergence { iterations: usize },

    #[error("{0} diverges and was requested as a number")]
    DivergentOutput(String),

    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Bad input as opposed to a numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput { .. }
                | Error::Parse { .. }
                | Error::Io(_)
                | Error::DimensionMismatch(_)
        )
    }

    pub(crate) fn invalid(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidInput {
            key: key.into(),
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
