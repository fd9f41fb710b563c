use thiserror::Error;

/// Errors raised by every module of the crate.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("pole: {0}")]
    Pole(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid descriptor: {0}")]
    Validation(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("series kind mismatch: expected {expected}, found {found}")]
    KindMismatch { expected: String, found: String },
    #[error("no continuation oracle for coefficient provider '{0}'")]
    NoOracle(String),
    #[error("alpha = {alpha} is not in the spectrum (n_alpha = {n_alpha})")]
    NotInSpectrum { alpha: f64, n_alpha: f64 },
    #[error("non-convergence: {0}")]
    NonConvergence(String),
    #[error("ill-conditioned fit: {0}")]
    IllConditioned(String),
    #[error("incompatible system: {0}")]
    Incompatible(String),
    /// Bad command line input.
    #[error("usage: {0}")]
    Usage(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

impl Error {
    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonConvergence(_) | Error::IllConditioned(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
