use thiserror::Error;

use crate::geometry::Field;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid kinetics: {0}")]
    InvalidKinetics(String),

    /// A time step produced non-finite values or its implicit solve failed.
    #[error("time step failed at t = {t}: {reason}")]
    StepFailed { t: f64, reason: String },

    /// Newton or fixed-point iteration ran out of iterations. Carries the last
    /// iterate so callers can inspect where it stalled.
    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        last: Option<Box<Field>>,
    },

    /// Zero pivot while factoring a Jacobian: the linearization is (numerically)
    /// degenerate at the current iterate.
    #[error("singular Jacobian at row {row} (pivot {pivot:.3e})")]
    SingularJacobian { row: usize, pivot: f64 },

    #[error("negative component {value:.3e} at node {node}")]
    NegativeComponent { node: usize, value: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
