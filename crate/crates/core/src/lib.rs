//! Fractional linear, non-linear and sublinear death processes.
//!
//! State probabilities of the pure-death chains whose master equations use
//! a Caputo time derivative of order `ν ∈ (0, 1]`, their means and
//! generating functions, Monte Carlo samplers built on the inverse stable
//! subordinator, and numerical oracles (Caputo residuals, Laplace inversion,
//! classical ODE integration) that cross-check the closed forms.

pub mod cli;
pub mod death_processes;
pub mod error;
pub mod exec;
pub mod quadrature;
pub mod special_functions;
pub mod stats;
pub mod subordination;
pub mod summation;
pub mod verification;

pub use error::{Error, Result};
pub use exec::Execution;
pub use special_functions::{AccuracySpec, FractionalOrder, MLArgument};
