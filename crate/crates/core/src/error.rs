use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("power iteration did not converge after {iterations} iterations (best estimate {estimate})")]
    PowerIterationNotConverged { iterations: usize, estimate: f64 },

    #[error("non-positive curvature {curvature} along a search direction")]
    NonPositiveCurvature { curvature: f64 },

    #[error("non-finite value encountered in {context}")]
    NonFinite { context: String },

    #[error("ellipse coefficients requested for dependent gradients (delta = {delta}, threshold = {threshold})")]
    DependentGradients { delta: f64, threshold: f64 },

    #[error("zero gradient: {0}")]
    ZeroGradient(String),

    #[error("direction is not a descent direction (slope {slope})")]
    NotDescent { slope: f64 },

    #[error("line search found no sufficient-decrease step in {trials} trials")]
    LineSearchFailed { trials: usize },

    #[error("level-point expansion exceeded {budget} doublings")]
    ExpansionBudget { budget: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, actual })
    }
}

pub(crate) fn check_finite(x: &[f64], context: &str) -> Result<()> {
    if crate::kernels::all_finite(x) {
        Ok(())
    } else {
        Err(Error::NonFinite {
            context: context.to_string(),
        })
    }
}
