use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ObservablesError {
    #[error("not enough data: {0}")]
    InsufficientData(String),
    #[error("timestamps must be strictly increasing (index {index})")]
    NonMonotonicTime { index: usize },
    #[error("norm {norm} at t = {t} outside 1 +- {tol}")]
    NormOutOfTolerance { t: f64, norm: f64, tol: f64 },
    #[error("fit did not converge: {0}")]
    NonConvergence(String),
    #[error("ambiguous spectral peak: runner-up at {runner_up} has {ratio:.2} of the main peak at {main}")]
    AmbiguousPeak { main: f64, runner_up: f64, ratio: f64 },
    #[error("linear fit R^2 = {r2:.4} below threshold {min:.4}")]
    PoorLinearFit { r2: f64, min: f64 },
    #[error("time ranges do not overlap")]
    DisjointRanges,
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for ObservablesError {
    fn from(e: std::io::Error) -> Self {
        ObservablesError::Io(e.to_string())
    }
}
