#![allow(dead_code)]

pub mod oracle_values;

use fracdeath::death_processes::{EvalOptions, LinearDeathSpec, NonlinearDeathSpec, Process, SublinearDeathSpec};
use fracdeath::special_functions::ml_one_param;
use fracdeath::{AccuracySpec, FractionalOrder};

pub fn nu(v: f64) -> FractionalOrder {
    FractionalOrder::new(v).unwrap()
}

pub fn e(v: f64, x: f64) -> f64 {
    ml_one_param(nu(v), x, &AccuracySpec::default()).unwrap()
}

pub fn opts() -> EvalOptions {
    EvalOptions::default()
}

pub fn linear(n0: u32, mu: f64) -> LinearDeathSpec {
    LinearDeathSpec::new(n0, mu).unwrap()
}

pub fn sublinear(n0: u32, mu: f64) -> SublinearDeathSpec {
    SublinearDeathSpec::new(n0, mu).unwrap()
}

/// Distinct, unevenly spaced rates for `n0` states.
pub fn uneven_rates(n0: u32) -> NonlinearDeathSpec {
    NonlinearDeathSpec::new((1..=n0).map(|k| 0.5 + 0.3 * (k * k) as f64).collect()).unwrap()
}

/// Linear, sublinear and non-linear processes with `n0` individuals.
pub fn death_processes(n0: u32) -> Vec<Process> {
    vec![
        Process::Linear(linear(n0, 1.0)),
        Process::Sublinear(sublinear(n0, 1.0)),
        Process::Nonlinear(uneven_rates(n0)),
    ]
}

pub fn assert_close(a: f64, b: f64, tol: f64, what: &str) {
    assert!(
        (a - b).abs() <= tol,
        "{what}: {a} vs {b} (diff {:e}, tol {tol:e})",
        (a - b).abs()
    );
}
