use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("validation error: {0}")]
    Validation(String),
    #[error("t = {t} lies beyond the last curve knot {last}")]
    Extrapolation { t: f64, last: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("singularity: {0}")]
    Singularity(String),
    /// Second cumulant not positive, the expansion has no Gaussian kernel.
    #[error("Gram-Charlier expansion undefined: c2 = {c2}")]
    ExpansionUndefined { c2: f64 },
    #[error("time {t} is not on the simulation grid")]
    OffGrid { t: f64 },
    #[error("simulation horizon {horizon} does not cover {required}")]
    Horizon { horizon: f64, required: f64 },
}

impl Error {
    pub(crate) fn io(path: &std::path::Path, err: impl std::fmt::Display) -> Self {
        Error::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }
}
