//! State probabilities, means and generating functions of the fractional
//! linear, non-linear and sublinear death processes, plus the fractional
//! linear birth process.
//!
//! Every closed form is an alternating combination `Σ c_j E_{ν,1}(-a_j t^ν)`.
//! These lose digits when `Σ |c_j E_j|` is large compared with the result, so
//! each evaluation tracks that amplification, together with the error the
//! coefficients propagate from the Mittag-Leffler values, and refuses to
//! return a value once either passes its limit in [`EvalOptions`]. The mixture evaluation
//! mode sidesteps the cancellation entirely by averaging the classical
//! (positive) closed form over the Wright-distributed random rate.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::special_functions::{
    binomial, mittag_leffler_eval, ml_one_param, wright_expectation, AccuracySpec, FractionalOrder, MLArgument,
};
use crate::summation::{CompensatedSum, DoubleDouble};

pub const DEFAULT_STABILITY_LIMIT: f64 = 1e8;
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-9;
pub const DEFAULT_ERROR_LIMIT: f64 = 1e-6;
/// Relative size of the perturbation applied by [`EvalOptions::inject_fault`].
pub const FAULT_SIZE: f64 = 1e-3;

fn check_rate(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be positive and finite, got {v}")))
    }
}

fn check_n0(n0: u32) -> Result<()> {
    if n0 >= 1 {
        Ok(())
    } else {
        Err(Error::domain("n0 must be at least 1"))
    }
}

/// Death rate `μ k` in state `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LinearDeathRaw")]
pub struct LinearDeathSpec {
    n0: u32,
    mu: f64,
}

#[derive(Deserialize)]
struct LinearDeathRaw {
    n0: u32,
    mu: f64,
}

impl TryFrom<LinearDeathRaw> for LinearDeathSpec {
    type Error = Error;
    fn try_from(r: LinearDeathRaw) -> Result<Self> {
        Self::new(r.n0, r.mu)
    }
}

impl LinearDeathSpec {
    pub fn new(n0: u32, mu: f64) -> Result<Self> {
        check_n0(n0)?;
        check_rate("mu", mu)?;
        Ok(Self { n0, mu })
    }
    pub fn n0(&self) -> u32 {
        self.n0
    }
    pub fn mu(&self) -> f64 {
        self.mu
    }
}

/// Arbitrary pairwise-distinct death rates `μ_1, …, μ_{n0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NonlinearDeathRaw")]
pub struct NonlinearDeathSpec {
    rates: Vec<f64>,
}

#[derive(Deserialize)]
struct NonlinearDeathRaw {
    rates: Vec<f64>,
}

impl TryFrom<NonlinearDeathRaw> for NonlinearDeathSpec {
    type Error = Error;
    fn try_from(r: NonlinearDeathRaw) -> Result<Self> {
        Self::new(r.rates)
    }
}

impl NonlinearDeathSpec {
    /// `rates[i]` is the death rate in state `i + 1`.
    pub fn new(rates: Vec<f64>) -> Result<Self> {
        if rates.is_empty() {
            return Err(Error::domain("at least one rate is required"));
        }
        for &r in &rates {
            check_rate("rate", r)?;
        }
        check_distinct(&rates, DEFAULT_DEGENERACY_TOL)?;
        Ok(Self { rates })
    }

    /// Rates `μ_k = k μ`, i.e. the linear process written in non-linear form.
    pub fn linear(n0: u32, mu: f64) -> Result<Self> {
        check_n0(n0)?;
        Self::new((1..=n0).map(|k| k as f64 * mu).collect())
    }

    pub fn n0(&self) -> u32 {
        self.rates.len() as u32
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    /// `μ_k` for `1 ≤ k ≤ n0`.
    pub fn rate(&self, k: u32) -> f64 {
        self.rates[k as usize - 1]
    }
}

/// Death rate `μ (n0 + 1 - k)` in state `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LinearDeathRaw")]
pub struct SublinearDeathSpec {
    n0: u32,
    mu: f64,
}

impl TryFrom<LinearDeathRaw> for SublinearDeathSpec {
    type Error = Error;
    fn try_from(r: LinearDeathRaw) -> Result<Self> {
        Self::new(r.n0, r.mu)
    }
}

impl SublinearDeathSpec {
    pub fn new(n0: u32, mu: f64) -> Result<Self> {
        check_n0(n0)?;
        check_rate("mu", mu)?;
        Ok(Self { n0, mu })
    }
    pub fn n0(&self) -> u32 {
        self.n0
    }
    pub fn mu(&self) -> f64 {
        self.mu
    }
}

/// Linear birth process with rate `λ k`, started from one individual.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BirthRaw")]
pub struct BirthSpec {
    lambda: f64,
}

#[derive(Deserialize)]
struct BirthRaw {
    lambda: f64,
}

impl TryFrom<BirthRaw> for BirthSpec {
    type Error = Error;
    fn try_from(r: BirthRaw) -> Result<Self> {
        Self::new(r.lambda)
    }
}

impl BirthSpec {
    pub fn new(lambda: f64) -> Result<Self> {
        check_rate("lambda", lambda)?;
        Ok(Self { lambda })
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "process", rename_all = "snake_case")]
pub enum Process {
    Linear(LinearDeathSpec),
    Nonlinear(NonlinearDeathSpec),
    Sublinear(SublinearDeathSpec),
    Birth(BirthSpec),
}

impl Process {
    pub fn name(&self) -> &'static str {
        match self {
            Process::Linear(_) => "linear",
            Process::Nonlinear(_) => "nonlinear",
            Process::Sublinear(_) => "sublinear",
            Process::Birth(_) => "birth",
        }
    }

    /// Initial state.
    pub fn initial_state(&self) -> u32 {
        match self {
            Process::Linear(s) => s.n0,
            Process::Nonlinear(s) => s.n0(),
            Process::Sublinear(s) => s.n0,
            Process::Birth(_) => 1,
        }
    }

    pub fn is_death(&self) -> bool {
        !matches!(self, Process::Birth(_))
    }

    /// Total jump rate out of state `k`.
    pub fn rate(&self, k: u32) -> f64 {
        match self {
            Process::Linear(s) => s.mu * k as f64,
            Process::Nonlinear(s) if k == 0 => 0.0,
            Process::Nonlinear(s) => s.rate(k),
            Process::Sublinear(s) if k == 0 => 0.0,
            Process::Sublinear(s) => s.mu * (s.n0 + 1 - k) as f64,
            Process::Birth(s) => s.lambda * k as f64,
        }
    }

    /// States `0..=n0` for death processes, `1..=kmax` for the birth process.
    pub fn support(&self, kmax: u32) -> Vec<u32> {
        match self {
            Process::Birth(_) => (1..=kmax.max(1)).collect(),
            _ => (0..=self.initial_state()).collect(),
        }
    }

    /// Whether the state lies in the process's state space.
    pub fn contains(&self, k: u32) -> bool {
        match self {
            Process::Birth(_) => k >= 1,
            _ => k <= self.initial_state(),
        }
    }
}

/// How alternating closed forms are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Evaluation {
    /// Closed form with compensated summation; `Error::Stability` when the
    /// cancellation is too strong.
    #[default]
    Direct,
    /// Wright mixture of the classical distribution. Cancellation-free but
    /// slower; unavailable for non-linear rates.
    Mixture,
    /// Direct, falling back to the mixture on `Error::Stability` or
    /// `Error::PrecisionLoss`.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalOptions {
    pub accuracy: AccuracySpec,
    pub stability_limit: f64,
    /// Largest acceptable error bound of a direct closed form.
    pub error_limit: f64,
    pub evaluation: Evaluation,
    pub degeneracy_tol: f64,
    /// Test hook: scales the linear-process probability of the initial state
    /// by `1 + FAULT_SIZE` so that the verification suite has something to
    /// catch.
    pub inject_fault: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            accuracy: AccuracySpec::default(),
            stability_limit: DEFAULT_STABILITY_LIMIT,
            error_limit: DEFAULT_ERROR_LIMIT,
            evaluation: Evaluation::Direct,
            degeneracy_tol: DEFAULT_DEGENERACY_TOL,
            inject_fault: false,
        }
    }
}

impl EvalOptions {
    pub fn with_evaluation(mut self, evaluation: Evaluation) -> Self {
        self.evaluation = evaluation;
        self
    }
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("time must be finite and non-negative, got {t}")))
    }
}

fn check_state(n0: u32, k: u32) -> Result<()> {
    if k <= n0 {
        Ok(())
    } else {
        Err(Error::domain(format!("state {k} outside 0..={n0}")))
    }
}

fn sign(j: u32) -> f64 {
    if j % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `E_{ν,1}(x)` with its error estimate.
#[derive(Debug, Clone, Copy)]
struct MlValue {
    value: f64,
    error: f64,
}

fn ml_value(nu: FractionalOrder, x: f64, acc: &AccuracySpec) -> Result<MlValue> {
    if x == 0.0 {
        return Ok(MlValue { value: 1.0, error: 0.0 });
    }
    let e = mittag_leffler_eval(&MLArgument::new(nu, 1.0, x)?, acc)?;
    Ok(MlValue {
        value: e.value,
        error: e.error_estimate,
    })
}

/// `E_{ν,1}(-j a t^ν)` for `j = 0..=n`.
fn ml_ladder(nu: FractionalOrder, a: f64, t: f64, n: u32, acc: &AccuracySpec) -> Result<Vec<MlValue>> {
    let tn = t.powf(nu.value());
    (0..=n).map(|j| ml_value(nu, -(j as f64) * a * tn, acc)).collect()
}

/// `Σ_j c_j E_j`, tracking the rounding amplification and the error the
/// coefficients propagate from the Mittag-Leffler values.
#[derive(Debug, Default)]
struct ClosedFormSum {
    sum: CompensatedSum,
    propagated: f64,
}

impl ClosedFormSum {
    fn add(&mut self, c: f64, e: MlValue) {
        self.sum.add(c * e.value);
        self.propagated += c.abs() * e.error;
    }

    fn add_exact(&mut self, x: f64) {
        self.sum.add(x);
    }

    /// Fails when the amplification `Σ|c_j E_j| / max(|result|, 1)` exceeds
    /// `stability_limit` or the error bound exceeds `error_limit`.
    fn finish(&self, opts: &EvalOptions) -> Result<f64> {
        let value = self.sum.value();
        let magnitude = self.sum.magnitude();
        let limit = opts.stability_limit;
        if !value.is_finite() || !magnitude.is_finite() {
            return Err(Error::Stability {
                amplification: f64::INFINITY,
                limit,
            });
        }
        let amplification = magnitude / value.abs().max(1.0);
        if amplification > limit {
            return Err(Error::Stability { amplification, limit });
        }
        let bound = self.propagated + 4.0 * f64::EPSILON * magnitude;
        if bound > opts.error_limit {
            return Err(Error::PrecisionLoss {
                bound,
                limit: opts.error_limit,
            });
        }
        Ok(value)
    }
}

/// Runs the direct evaluation, the mixture, or both, according to the mode.
fn dispatch(
    mode: Evaluation,
    direct: impl FnOnce() -> Result<f64>,
    mixture: Option<impl FnOnce() -> Result<f64>>,
) -> Result<f64> {
    match (mode, mixture) {
        (Evaluation::Direct, _) => direct(),
        (Evaluation::Mixture, Some(m)) => m(),
        (Evaluation::Mixture, None) => Err(Error::domain("mixture evaluation is not available for this process")),
        (Evaluation::Auto, m) => match direct() {
            Err(Error::Stability { .. } | Error::PrecisionLoss { .. }) if m.is_some() => m.unwrap()(),
            other => other,
        },
    }
}

/// `E[g(t^ν Ξ)]`: the classical quantity `g(s)` averaged over the
/// fractional time scale.
fn mixture(nu: FractionalOrder, t: f64, opts: &EvalOptions, g: impl Fn(f64) -> f64) -> Result<f64> {
    let tn = t.powf(nu.value());
    wright_expectation(nu, |xi| g(tn * xi), &opts.accuracy)
}

/// `1 - e^{-x}` without cancellation at small `x`.
fn one_minus_exp(x: f64) -> f64 {
    -(-x).exp_m1()
}

fn classical_linear(n0: u32, k: u32, a: f64) -> f64 {
    binomial(n0, k) * (-(k as f64) * a).exp() * one_minus_exp(a).powi((n0 - k) as i32)
}

fn classical_sublinear(n0: u32, k: u32, a: f64) -> f64 {
    if k == 0 {
        one_minus_exp(a).powi(n0 as i32)
    } else {
        (-a).exp() * one_minus_exp(a).powi((n0 - k) as i32)
    }
}

fn classical_birth(k: u32, a: f64) -> f64 {
    (-a).exp() * one_minus_exp(a).powi(k as i32 - 1)
}

fn faulted(spec: &LinearDeathSpec, k: u32, value: f64, opts: &EvalOptions) -> f64 {
    if opts.inject_fault && k == spec.n0 {
        value * (1.0 + FAULT_SIZE)
    } else {
        value
    }
}

fn linear_direct(spec: &LinearDeathSpec, ladder: &[MlValue], k: u32, opts: &EvalOptions) -> Result<f64> {
    let m = spec.n0 - k;
    let ck = binomial(spec.n0, k);
    let mut sum = ClosedFormSum::default();
    for r in 0..=m {
        sum.add(sign(r) * ck * binomial(m, r), ladder[(k + r) as usize]);
    }
    sum.finish(opts)
}

/// `p_k(t) = C(n0,k) Σ_r C(n0-k,r) (-1)^r E_{ν,1}(-(k+r) μ t^ν)`.
pub fn linear_pmf(spec: &LinearDeathSpec, nu: FractionalOrder, t: f64, k: u32, opts: &EvalOptions) -> Result<f64> {
    check_time(t)?;
    check_state(spec.n0, k)?;
    if t == 0.0 {
        return Ok(faulted(spec, k, if k == spec.n0 { 1.0 } else { 0.0 }, opts));
    }
    let value = dispatch(
        opts.evaluation,
        || {
            let ladder = ml_ladder(nu, spec.mu, t, spec.n0, &opts.accuracy)?;
            linear_direct(spec, &ladder, k, opts)
        },
        Some(|| mixture(nu, t, opts, |s| classical_linear(spec.n0, k, spec.mu * s))),
    )?;
    Ok(faulted(spec, k, value, opts))
}

/// Rejects rate vectors with a pair closer than `tol · max(rates)`.
pub fn check_distinct(rates: &[f64], tol: f64) -> Result<()> {
    let scale = rates.iter().cloned().fold(0.0, f64::max);
    for i in 0..rates.len() {
        for j in i + 1..rates.len() {
            if (rates[i] - rates[j]).abs() < tol * scale {
                return Err(Error::DegenerateRates {
                    first: i + 1,
                    second: j + 1,
                });
            }
        }
    }
    Ok(())
}

/// `Σ_m Π_{h≠m} μ_h / (μ_h - μ_m)`, which equals one for distinct rates.
pub fn vandermonde_identity_check(rates: &[f64]) -> Result<f64> {
    for &r in rates {
        check_rate("rate", r)?;
    }
    check_distinct(rates, DEFAULT_DEGENERACY_TOL)?;
    // the terms are large and alternate, so they are formed and summed in
    // double-double arithmetic
    let mut sum = DoubleDouble::new(0.0);
    for (m, &mu_m) in rates.iter().enumerate() {
        let mut prod = DoubleDouble::new(1.0);
        for (h, &mu_h) in rates.iter().enumerate() {
            if h != m {
                prod = prod.mul(DoubleDouble::new(mu_h).div(DoubleDouble::diff(mu_h, mu_m)));
            }
        }
        sum = sum.add(prod);
    }
    Ok(sum.to_f64())
}

fn nonlinear_direct(spec: &NonlinearDeathSpec, ml: &[MlValue], k: u32, opts: &EvalOptions) -> Result<f64> {
    let n0 = spec.n0();
    // ml[m - 1] = E(-μ_m t^ν)
    if k == n0 {
        return Ok(ml[n0 as usize - 1].value);
    }
    let mut sum = ClosedFormSum::default();
    if k == 0 {
        sum.add_exact(1.0);
        for m in 1..=n0 {
            let mu_m = spec.rate(m);
            let mut prod = 1.0;
            for h in (1..=n0).filter(|&h| h != m) {
                let mu_h = spec.rate(h);
                prod *= mu_h / (mu_h - mu_m);
            }
            sum.add(-prod, ml[m as usize - 1]);
        }
    } else {
        for m in k..=n0 {
            let mu_m = spec.rate(m);
            // n0 - k numerator rates μ_{k+1..n0} against the n0 - k
            // differences μ_h - μ_m, h ≠ m, taken pairwise
            let mut coef = 1.0;
            let mut hs = (k..=n0).filter(|&h| h != m);
            for j in k + 1..=n0 {
                let h = hs.next().expect("one difference per numerator rate");
                coef *= spec.rate(j) / (spec.rate(h) - mu_m);
            }
            sum.add(coef, ml[m as usize - 1]);
        }
    }
    sum.finish(opts)
}

/// State probabilities of the death process with arbitrary distinct rates.
pub fn nonlinear_pmf(
    spec: &NonlinearDeathSpec,
    nu: FractionalOrder,
    t: f64,
    k: u32,
    opts: &EvalOptions,
) -> Result<f64> {
    check_time(t)?;
    let n0 = spec.n0();
    check_state(n0, k)?;
    check_distinct(&spec.rates, opts.degeneracy_tol)?;
    if t == 0.0 {
        return Ok(if k == n0 { 1.0 } else { 0.0 });
    }
    dispatch(
        opts.evaluation,
        || {
            let ml = nonlinear_ladder(spec, nu, t, &opts.accuracy)?;
            nonlinear_direct(spec, &ml, k, opts)
        },
        None::<fn() -> Result<f64>>,
    )
}

fn nonlinear_ladder(
    spec: &NonlinearDeathSpec,
    nu: FractionalOrder,
    t: f64,
    acc: &AccuracySpec,
) -> Result<Vec<MlValue>> {
    let tn = t.powf(nu.value());
    spec.rates.iter().map(|&mu| ml_value(nu, -mu * tn, acc)).collect()
}

fn sublinear_direct(spec: &SublinearDeathSpec, ladder: &[MlValue], k: u32, opts: &EvalOptions) -> Result<f64> {
    let n0 = spec.n0;
    let mut sum = ClosedFormSum::default();
    if k == 0 {
        for l in 0..=n0 {
            sum.add(sign(l) * binomial(n0, l), ladder[l as usize]);
        }
    } else {
        let m = n0 - k;
        for l in 0..=m {
            sum.add(sign(l) * binomial(m, l), ladder[(l + 1) as usize]);
        }
    }
    sum.finish(opts)
}

/// `𝔭_k(t) = Σ_l C(n0-k,l) (-1)^l E_{ν,1}(-(l+1) μ t^ν)` for `k ≥ 1` and the
/// extinction probability `Σ_l C(n0,l) (-1)^l E_{ν,1}(-l μ t^ν)` for `k = 0`.
pub fn sublinear_pmf(
    spec: &SublinearDeathSpec,
    nu: FractionalOrder,
    t: f64,
    k: u32,
    opts: &EvalOptions,
) -> Result<f64> {
    check_time(t)?;
    check_state(spec.n0, k)?;
    if t == 0.0 {
        return Ok(if k == spec.n0 { 1.0 } else { 0.0 });
    }
    dispatch(
        opts.evaluation,
        || {
            let ladder = ml_ladder(nu, spec.mu, t, spec.n0, &opts.accuracy)?;
            sublinear_direct(spec, &ladder, k, opts)
        },
        Some(|| mixture(nu, t, opts, |s| classical_sublinear(spec.n0, k, spec.mu * s))),
    )
}

fn birth_direct(ladder: &[MlValue], k: u32, opts: &EvalOptions) -> Result<f64> {
    let mut sum = ClosedFormSum::default();
    for j in 1..=k {
        sum.add(sign(j - 1) * binomial(k - 1, j - 1), ladder[j as usize]);
    }
    sum.finish(opts)
}

/// `p̂_k(t) = Σ_{j=1}^k C(k-1,j-1) (-1)^{j-1} E_{ν,1}(-λ j t^ν)`, `k ≥ 1`.
pub fn birth_pmf(spec: &BirthSpec, nu: FractionalOrder, t: f64, k: u32, opts: &EvalOptions) -> Result<f64> {
    check_time(t)?;
    if k == 0 {
        return Err(Error::domain("birth process states start at 1"));
    }
    if t == 0.0 {
        return Ok(if k == 1 { 1.0 } else { 0.0 });
    }
    dispatch(
        opts.evaluation,
        || {
            let ladder = ml_ladder(nu, spec.lambda, t, k, &opts.accuracy)?;
            birth_direct(&ladder, k, opts)
        },
        Some(|| mixture(nu, t, opts, |s| classical_birth(k, spec.lambda * s))),
    )
}

/// Probability of state `k` for any process.
pub fn pmf(process: &Process, nu: FractionalOrder, t: f64, k: u32, opts: &EvalOptions) -> Result<f64> {
    match process {
        Process::Linear(s) => linear_pmf(s, nu, t, k, opts),
        Process::Nonlinear(s) => nonlinear_pmf(s, nu, t, k, opts),
        Process::Sublinear(s) => sublinear_pmf(s, nu, t, k, opts),
        Process::Birth(s) => birth_pmf(s, nu, t, k, opts),
    }
}

/// Probabilities of `states` at time `t`, sharing the Mittag-Leffler
/// evaluations between states.
pub fn pmf_vector(
    process: &Process,
    nu: FractionalOrder,
    t: f64,
    states: &[u32],
    opts: &EvalOptions,
) -> Result<Vec<f64>> {
    check_time(t)?;
    for &k in states {
        if !process.contains(k) {
            return Err(Error::domain(format!(
                "state {k} is outside the {} state space",
                process.name()
            )));
        }
    }
    if t == 0.0 || opts.evaluation != Evaluation::Direct {
        return states.iter().map(|&k| pmf(process, nu, t, k, opts)).collect();
    }
    match process {
        Process::Linear(s) => {
            let ladder = ml_ladder(nu, s.mu, t, s.n0, &opts.accuracy)?;
            states
                .iter()
                .map(|&k| linear_direct(s, &ladder, k, opts).map(|p| faulted(s, k, p, opts)))
                .collect()
        }
        Process::Nonlinear(s) => {
            check_distinct(&s.rates, opts.degeneracy_tol)?;
            let ml = nonlinear_ladder(s, nu, t, &opts.accuracy)?;
            states.iter().map(|&k| nonlinear_direct(s, &ml, k, opts)).collect()
        }
        Process::Sublinear(s) => {
            let ladder = ml_ladder(nu, s.mu, t, s.n0, &opts.accuracy)?;
            states.iter().map(|&k| sublinear_direct(s, &ladder, k, opts)).collect()
        }
        Process::Birth(s) => {
            let kmax = states.iter().copied().max().unwrap_or(1);
            let ladder = ml_ladder(nu, s.lambda, t, kmax, &opts.accuracy)?;
            states.iter().map(|&k| birth_direct(&ladder, k, opts)).collect()
        }
    }
}

/// `E M(t) = n0 E_{ν,1}(-μ t^ν)`.
pub fn linear_mean(spec: &LinearDeathSpec, nu: FractionalOrder, t: f64, opts: &EvalOptions) -> Result<f64> {
    check_time(t)?;
    if t == 0.0 {
        return Ok(spec.n0 as f64);
    }
    Ok(spec.n0 as f64 * ml_one_param(nu, -spec.mu * t.powf(nu.value()), &opts.accuracy)?)
}

/// `E 𝔐(t) = Σ_{k=1}^{n0} C(n0+1,k+1) (-1)^{k+1} E_{ν,1}(-μ k t^ν)`.
pub fn sublinear_mean(spec: &SublinearDeathSpec, nu: FractionalOrder, t: f64, opts: &EvalOptions) -> Result<f64> {
    check_time(t)?;
    let n0 = spec.n0;
    if t == 0.0 {
        return Ok(n0 as f64);
    }
    dispatch(
        opts.evaluation,
        || {
            let ladder = ml_ladder(nu, spec.mu, t, n0, &opts.accuracy)?;
            let mut sum = ClosedFormSum::default();
            for k in 1..=n0 {
                sum.add(sign(k + 1) * binomial(n0 + 1, k + 1), ladder[k as usize]);
            }
            sum.finish(opts)
        },
        Some(|| {
            mixture(nu, t, opts, |s| {
                let a = spec.mu * s;
                (1..=n0).map(|k| k as f64 * classical_sublinear(n0, k, a)).sum()
            })
        }),
    )
}

/// `E N(t) = E_{ν,1}(λ t^ν)` for the birth process (growing branch).
pub fn birth_mean(spec: &BirthSpec, nu: FractionalOrder, t: f64, opts: &EvalOptions) -> Result<f64> {
    check_time(t)?;
    if t == 0.0 {
        return Ok(1.0);
    }
    let arg = MLArgument::new(nu, 1.0, spec.lambda * t.powf(nu.value()))?;
    crate::special_functions::mittag_leffler(&arg, &opts.accuracy)
}

/// Mean population for the processes that have a mean formula; the
/// non-linear mean is `Σ k p_k`.
pub fn mean(process: &Process, nu: FractionalOrder, t: f64, opts: &EvalOptions) -> Result<f64> {
    match process {
        Process::Linear(s) => linear_mean(s, nu, t, opts),
        Process::Sublinear(s) => sublinear_mean(s, nu, t, opts),
        Process::Birth(s) => birth_mean(s, nu, t, opts),
        Process::Nonlinear(s) => {
            let states: Vec<u32> = (0..=s.n0()).collect();
            let p = pmf_vector(process, nu, t, &states, opts)?;
            let mut sum = CompensatedSum::new();
            for (k, pk) in states.iter().zip(p) {
                sum.add(*k as f64 * pk);
            }
            Ok(sum.value())
        }
    }
}

/// Probability generating function `Σ_k u^k p_k(t)`, `|u| ≤ 1`.
///
/// Death processes sum the pmf; the birth process has infinitely many
/// states and averages the classical geometric generating function
/// `u e^{-λs} / (1 - u (1 - e^{-λs}))` over the fractional time scale.
pub fn pgf(process: &Process, nu: FractionalOrder, u: f64, t: f64, opts: &EvalOptions) -> Result<f64> {
    check_time(t)?;
    if !(u.abs() <= 1.0) {
        return Err(Error::domain(format!("pgf needs |u| <= 1, got {u}")));
    }
    match process {
        Process::Birth(s) => {
            if t == 0.0 {
                return Ok(u);
            }
            mixture(nu, t, opts, |x| {
                let a = s.lambda * x;
                u * (-a).exp() / (1.0 - u * one_minus_exp(a))
            })
        }
        _ => {
            let states = process.support(0);
            let p = pmf_vector(process, nu, t, &states, opts)?;
            let mut sum = CompensatedSum::new();
            for (k, pk) in states.iter().zip(p) {
                sum.add(u.powi(*k as i32) * pk);
            }
            Ok(sum.value())
        }
    }
}

/// Probabilities on a time × state grid.
///
/// `probs[i][j]` is the probability of `states[j]` at `times[i]`, unclamped.
/// `norm_defect[i] = |1 - Σ_k p_k(times[i])|` over the whole state space for
/// death processes and over `1..=max(states)` for the birth process, where
/// it is the tail mass beyond the largest tabulated state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionTable {
    pub spec: Process,
    pub nu: FractionalOrder,
    pub times: Vec<f64>,
    pub states: Vec<u32>,
    pub probs: Vec<Vec<f64>>,
    pub norm_defect: Vec<f64>,
}

impl DistributionTable {
    pub fn compute(
        process: &Process,
        nu: FractionalOrder,
        times: &[f64],
        states: &[u32],
        opts: &EvalOptions,
        exec: &Execution,
    ) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::domain("no states selected"));
        }
        let kmax = states.iter().copied().max().unwrap_or(1);
        let full = process.support(kmax);
        let index: Vec<usize> = states
            .iter()
            .map(|k| {
                full.iter()
                    .position(|s| s == k)
                    .ok_or_else(|| Error::domain(format!("state {k} is outside the {} state space", process.name())))
            })
            .collect::<Result<_>>()?;
        let rows = exec.try_map(times.len(), |i| -> Result<(Vec<f64>, f64)> {
            let p = pmf_vector(process, nu, times[i], &full, opts)?;
            let defect = (1.0 - crate::summation::sum(&p)).abs();
            Ok((index.iter().map(|&j| p[j]).collect(), defect))
        })?;
        let (probs, norm_defect) = rows.into_iter().unzip();
        Ok(Self {
            spec: process.clone(),
            nu,
            times: times.to_vec(),
            states: states.to_vec(),
            probs,
            norm_defect,
        })
    }

    /// Largest distance of a raw probability outside `[0, 1]`.
    pub fn bound_violation(&self) -> f64 {
        self.probs
            .iter()
            .flatten()
            .map(|&p| (-p).max(p - 1.0).max(0.0))
            .fold(0.0, f64::max)
    }

    pub fn max_norm_defect(&self) -> f64 {
        self.norm_defect.iter().copied().fold(0.0, f64::max)
    }

    /// Copy with every probability clamped to `[0, 1]`, as exported.
    pub fn clamped(&self) -> Self {
        let mut out = self.clone();
        for p in out.probs.iter_mut().flatten() {
            *p = p.clamp(0.0, 1.0);
        }
        out
    }

    /// Long-format CSV `t,k,prob` with clamped probabilities.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,k,prob")?;
        for (t, row) in self.times.iter().zip(&self.probs) {
            for (k, p) in self.states.iter().zip(row) {
                writeln!(w, "{t},{k},{}", p.clamp(0.0, 1.0))?;
            }
        }
        Ok(())
    }

    /// JSON with clamped probabilities; `norm_defect` is the pre-clamp value.
    pub fn write_json<W: Write>(&self, w: W) -> std::io::Result<()> {
        serde_json::to_writer_pretty(w, &self.clamped()).map_err(std::io::Error::other)
    }

    pub fn from_json(s: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}
