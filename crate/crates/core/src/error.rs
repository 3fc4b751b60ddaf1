use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("quadrature did not converge: estimate {estimate}, error estimate {error_estimate}")]
    NonConvergence { estimate: f64, error_estimate: f64 },
    #[error("integrand shows no decay up to |x| = {reached}")]
    NoDecay { reached: f64 },
    #[error("empty input")]
    Empty,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{what}: size {size} exceeds cap {cap}")]
    TooLarge { what: &'static str, size: u64, cap: u64 },
    #[error("square-root argument has non-positive real part ({0})")]
    BranchCut(f64),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
