use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent input (wrong dimension, bad parameters, unknown tags).
    #[error("invalid input: {0}")]
    Input(String),

    /// A configuration file that cannot be read or fails validation.
    #[error("configuration error: {0}")]
    Config(String),

    /// An iterative solver hit its iteration cap. Carries the best residuals reached.
    #[error("eigensolver did not converge after {iterations} operator applications; best residuals {best_residuals:?} (tolerance {tolerance:e})")]
    NonConvergence {
        iterations: usize,
        best_residuals: Vec<f64>,
        tolerance: f64,
    },

    /// A self-check gate failed (e.g. the angular average did not integrate ΔV to zero).
    #[error("diagnostic failure: {0}")]
    Diagnostic(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn input_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
