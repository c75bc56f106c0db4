use thiserror::Error;

/// Errors produced by the solvers and diagnostics.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown profile `{0}`")]
    UnknownProfile(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("grid mismatch: {0}")]
    Mismatch(String),

    #[error("time step too large: dt = {dt:e} exceeds the stability limit {limit:e}")]
    TimeStepTooLarge { dt: f64, limit: f64 },

    #[error("numerical overflow after t = {last_valid_time}")]
    Overflow { last_valid_time: f64 },

    #[error("test function not resolved: {0}")]
    Unresolved(String),

    #[error("invalid trajectory: {0}")]
    InvalidTrajectory(String),

    #[error("profile construction failed: {0}")]
    ProfileConstruction(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(what: &str, x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}
