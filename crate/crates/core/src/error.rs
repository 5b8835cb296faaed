use thiserror::Error;

use crate::rootfind::RootError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A model parameter (k, θ, m, ...) is outside its admissible range.
    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("spin {spin} outside the state space {{0, ..., {m}}}")]
    SpinOutOfRange { spin: usize, m: usize },

    #[error(transparent)]
    Root(#[from] RootError),

    /// A computed fixed point failed its own residual check.
    #[error("internal consistency check failed: {what} (residual {residual:e})")]
    Consistency { what: String, residual: f64 },

    #[error("iteration {iteration}: component {index} became non-positive ({value})")]
    NumericalDomain { iteration: usize, index: usize, value: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// The requested measure does not exist at these parameters.
    #[error("measure {measure} does not exist at k = {k}, theta = {theta}")]
    MeasureAbsent { measure: String, k: u32, theta: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
