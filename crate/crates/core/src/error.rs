use thiserror::Error;

/// Numerical and validation failures raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("no evaluation regime reached tolerance {tolerance:e} (best estimate {estimate:e})")]
    NonConvergence { tolerance: f64, estimate: f64 },

    #[error("quadrature failed: error estimate {estimate:e} above tolerance {tolerance:e}")]
    QuadratureFailure { tolerance: f64, estimate: f64 },

    #[error("alternating sum unstable: amplification {amplification:e} exceeds limit {limit:e}")]
    Stability { amplification: f64, limit: f64 },

    #[error("closed form too inaccurate: propagated error bound {bound:e} exceeds limit {limit:e}")]
    PrecisionLoss { bound: f64, limit: f64 },

    #[error("degenerate rates: mu[{first}] and mu[{second}] differ by less than the tolerance")]
    DegenerateRates { first: usize, second: usize },

    #[error("step size too large: max rate * h = {product} exceeds {limit}")]
    StepSize { product: f64, limit: f64 },

    #[error("contour inversion failed: {0}")]
    ContourFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
