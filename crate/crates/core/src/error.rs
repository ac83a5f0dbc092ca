use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("validation failed: {0}")]
    Validation(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("size guard exceeded: {what} = {value} > {limit}")]
    GuardExceeded {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("map is not CPT (min Choi eigenvalue {min_eigenvalue:.3e}, trace residual {trace_residual:.3e})")]
    NotCpt {
        min_eigenvalue: f64,
        trace_residual: f64,
    },

    #[error("trace residual {residual:.3e} at step {step} exceeds {limit:.1e}")]
    TraceDrift {
        step: u64,
        residual: f64,
        limit: f64,
    },
}
