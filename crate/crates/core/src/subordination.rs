//! Monte Carlo for the fractional processes.
//!
//! The classical chains are simulated exactly (exponential holding times).
//! The fractional process at time `t` is the classical one read at the
//! random time `T_{2ν}(t) = t^ν Ξ`, where `Ξ = S^{-ν}` for a positive
//! `ν`-stable `S` drawn with Kanter's representation. The same `Ξ` also
//! gives the random-rate form: a linear death process with rate `μ Ξ`
//! observed at time `t^ν`.

use std::f64::consts::PI;
use std::io::Write;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::death_processes::{LinearDeathSpec, Process};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::special_functions::{ln_zolotarev, FractionalOrder};

/// Samples per independent stream in [`empirical_pmf`] and [`sample_clock`].
pub const CHUNK_SIZE: usize = 4096;

/// Reproducible random stream keyed by `(seed, stream_id)`.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self { seed, stream_id, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }
    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }
    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// One trajectory of a classical chain on `[0, horizon]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSample {
    /// `jump_times[i]` is the time of the jump into `states[i + 1]`.
    pub jump_times: Vec<f64>,
    pub states: Vec<u32>,
    /// Realised `T_{2ν}(t)` when the path was run on the fractional clock.
    pub clock: Option<f64>,
}

impl PathSample {
    pub fn final_state(&self) -> u32 {
        *self.states.last().expect("a path has at least its initial state")
    }

    /// State at time `s` (right-continuous).
    pub fn state_at(&self, s: f64) -> u32 {
        let jumps = self.jump_times.partition_point(|&j| j <= s);
        self.states[jumps]
    }
}

fn exp1<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // 1 - U lies in (0, 1]
    -(1.0 - rng.random::<f64>()).ln()
}

fn open_angle<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u = PI * rng.random::<f64>();
        if u > 0.0 {
            return u;
        }
    }
}

/// Runs the classical chain with all rates multiplied by `scale`, calling
/// `on_jump(time, new_state)` for every jump before `horizon`.
fn run_classical<R: Rng + ?Sized>(
    process: &Process,
    scale: f64,
    horizon: f64,
    rng: &mut R,
    mut on_jump: impl FnMut(f64, u32),
) -> u32 {
    let mut state = process.initial_state();
    let mut now = 0.0;
    let up = !process.is_death();
    loop {
        let rate = scale * process.rate(state);
        if rate <= 0.0 {
            return state;
        }
        now += exp1(rng) / rate;
        if now > horizon {
            return state;
        }
        state = if up { state + 1 } else { state - 1 };
        on_jump(now, state);
    }
}

/// State of the classical (`ν = 1`) chain at time `t`.
pub fn sample_classical<R: Rng + ?Sized>(process: &Process, t: f64, rng: &mut R) -> u32 {
    run_classical(process, 1.0, t, rng, |_, _| {})
}

/// Full classical trajectory on `[0, t]`.
pub fn sample_classical_path<R: Rng + ?Sized>(process: &Process, t: f64, rng: &mut R) -> PathSample {
    let mut jump_times = Vec::new();
    let mut states = vec![process.initial_state()];
    run_classical(process, 1.0, t, rng, |s, k| {
        jump_times.push(s);
        states.push(k);
    });
    PathSample {
        jump_times,
        states,
        clock: None,
    }
}

/// Wright-distributed `Ξ = (E / A(U))^{1-ν}`; `Ξ = 1` at `ν = 1`.
pub fn sample_wright_variable<R: Rng + ?Sized>(nu: FractionalOrder, rng: &mut R) -> f64 {
    if nu.is_classical() {
        return 1.0;
    }
    let v = nu.value();
    let u = open_angle(rng);
    let e = exp1(rng);
    ((e.ln() - ln_zolotarev(v, u)) * (1.0 - v)).exp()
}

/// Positive stable `S` with `E e^{-λS} = e^{-λ^ν}`; the constant 1 at `ν = 1`.
pub fn sample_stable_subordinator_unit<R: Rng + ?Sized>(nu: FractionalOrder, rng: &mut R) -> f64 {
    if nu.is_classical() {
        return 1.0;
    }
    let v = nu.value();
    let u = open_angle(rng);
    let e = exp1(rng);
    ((ln_zolotarev(v, u) - e.ln()) * (1.0 - v) / v).exp()
}

/// `T_{2ν}(t) = t^ν Ξ`, the inverse stable subordinator at time `t`.
pub fn sample_time_change<R: Rng + ?Sized>(nu: FractionalOrder, t: f64, rng: &mut R) -> f64 {
    if nu.is_classical() {
        return t;
    }
    t.powf(nu.value()) * sample_wright_variable(nu, rng)
}

/// `M(T_{2ν}(t))`: the classical chain read at the random clock.
pub fn sample_fractional_death<R: Rng + ?Sized>(process: &Process, nu: FractionalOrder, t: f64, rng: &mut R) -> u32 {
    let clock = sample_time_change(nu, t, rng);
    sample_classical(process, clock, rng)
}

/// Classical path run up to the realised clock `T_{2ν}(t)`.
pub fn sample_fractional_path<R: Rng + ?Sized>(
    process: &Process,
    nu: FractionalOrder,
    t: f64,
    rng: &mut R,
) -> PathSample {
    let clock = sample_time_change(nu, t, rng);
    let mut path = sample_classical_path(process, clock, rng);
    path.clock = Some(clock);
    path
}

/// Linear death process with random rate `μ Ξ`, observed at time `t^ν`.
pub fn sample_wright_rate_death<R: Rng + ?Sized>(
    spec: &LinearDeathSpec,
    nu: FractionalOrder,
    t: f64,
    rng: &mut R,
) -> u32 {
    let xi = sample_wright_variable(nu, rng);
    let process = Process::Linear(*spec);
    run_classical(&process, xi, t.powf(nu.value()), rng, |_, _| {})
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerKind {
    /// Classical chain at the random clock `T_{2ν}(t)`.
    #[default]
    Subordinated,
    /// Linear chain with Wright-distributed rate (linear process only).
    WrightRate,
    /// Classical chain at time `t`, ignoring `ν`.
    Classical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub process: Process,
    pub nu: FractionalOrder,
    pub t: f64,
    pub sampler: SamplerKind,
    pub n_samples: usize,
    pub seed: u64,
}

impl SimulationConfig {
    fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::domain("n_samples must be at least 1"));
        }
        if !(self.t >= 0.0) || !self.t.is_finite() {
            return Err(Error::domain(format!(
                "time must be finite and non-negative, got {}",
                self.t
            )));
        }
        if self.sampler == SamplerKind::WrightRate && !matches!(self.process, Process::Linear(_)) {
            return Err(Error::domain(
                "the random-rate sampler is defined for the linear process only",
            ));
        }
        Ok(())
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        match (self.sampler, &self.process) {
            (SamplerKind::Subordinated, p) => sample_fractional_death(p, self.nu, self.t, rng),
            (SamplerKind::WrightRate, Process::Linear(s)) => sample_wright_rate_death(s, self.nu, self.t, rng),
            (SamplerKind::WrightRate, _) => unreachable!("rejected by validate"),
            (SamplerKind::Classical, p) => sample_classical(p, self.t, rng),
        }
    }
}

/// Empirical state frequencies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalPmf {
    pub states: Vec<u32>,
    pub counts: Vec<u64>,
    pub n_samples: u64,
}

impl EmpiricalPmf {
    pub fn p_hat(&self) -> Vec<f64> {
        let n = self.n_samples as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }

    /// `√(p̂ (1 - p̂) / n)` per state.
    pub fn stderr(&self) -> Vec<f64> {
        let n = self.n_samples as f64;
        self.p_hat().iter().map(|&p| (p * (1.0 - p) / n).sqrt()).collect()
    }

    pub fn count(&self, k: u32) -> u64 {
        self.states.iter().position(|&s| s == k).map_or(0, |i| self.counts[i])
    }

    /// CSV `k,count,p_hat,stderr,p_analytic`; the last column is empty when
    /// no analytic values are supplied.
    pub fn write_csv<W: Write>(&self, mut w: W, analytic: Option<&[f64]>) -> std::io::Result<()> {
        writeln!(w, "k,count,p_hat,stderr,p_analytic")?;
        let (p, se) = (self.p_hat(), self.stderr());
        for i in 0..self.states.len() {
            let a = analytic
                .and_then(|a| a.get(i))
                .map(|v| v.to_string())
                .unwrap_or_default();
            writeln!(w, "{},{},{},{},{}", self.states[i], self.counts[i], p[i], se[i], a)?;
        }
        Ok(())
    }
}

/// Draws `n_samples` states in chunks of [`CHUNK_SIZE`]; chunk `i` uses
/// stream `i` of `seed`, so the result does not depend on the worker count.
pub fn empirical_pmf(config: &SimulationConfig, exec: &Execution) -> Result<EmpiricalPmf> {
    config.validate()?;
    let n = config.n_samples;
    let chunks = n.div_ceil(CHUNK_SIZE);
    let partial = exec.map(chunks, |c| {
        let mut rng = RngStream::new(config.seed, c as u64);
        let len = CHUNK_SIZE.min(n - c * CHUNK_SIZE);
        let mut counts: Vec<u64> = Vec::new();
        for _ in 0..len {
            let k = config.draw(&mut rng) as usize;
            if k >= counts.len() {
                counts.resize(k + 1, 0);
            }
            counts[k] += 1;
        }
        counts
    });
    let first = if config.process.is_death() { 0 } else { 1 };
    let mut last = config.process.initial_state() as usize;
    for c in &partial {
        last = last.max(c.len().saturating_sub(1));
    }
    let mut counts = vec![0u64; last + 1];
    for c in partial {
        for (k, v) in c.into_iter().enumerate() {
            counts[k] += v;
        }
    }
    Ok(EmpiricalPmf {
        states: (first..=last as u32).collect(),
        counts: counts[first as usize..].to_vec(),
        n_samples: n as u64,
    })
}

/// `n` independent draws of `T_{2ν}(t)`, chunked like [`empirical_pmf`].
pub fn sample_clock(nu: FractionalOrder, t: f64, n: usize, seed: u64, exec: &Execution) -> Vec<f64> {
    let chunks = n.div_ceil(CHUNK_SIZE);
    exec.map(chunks, |c| {
        let mut rng = RngStream::new(seed, c as u64);
        let len = CHUNK_SIZE.min(n - c * CHUNK_SIZE);
        (0..len)
            .map(|_| sample_time_change(nu, t, &mut rng))
            .collect::<Vec<_>>()
    })
    .concat()
}
