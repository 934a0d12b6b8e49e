use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("root finder did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("quadrature did not reach tolerance {tol:e}: estimated error {achieved:e} after {subdivisions} subdivisions")]
    Quadrature {
        tol: f64,
        achieved: f64,
        subdivisions: usize,
    },

    #[error("{failures} of {trials} trials failed in the root finder (limit 0.1%)")]
    FailureRate { failures: usize, trials: usize },

    #[error("requested {requested} roots exceeds the limit of {limit}")]
    MemoryGuard { requested: u64, limit: u64 },

    #[error("radius {radius} reproduces probability {achieved}, requested {requested}")]
    RoundTrip {
        radius: f64,
        requested: f64,
        achieved: f64,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
