//! Goodness-of-fit tests used to compare samplers with the closed forms.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

/// Minimum expected count per cell before pooling.
pub const MIN_EXPECTED: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    /// Degrees of freedom for chi-square tests, sample size for KS.
    pub dof: f64,
    pub p_value: f64,
}

impl TestResult {
    /// Whether the null hypothesis survives at significance `level`.
    pub fn passes(&self, level: f64) -> bool {
        self.p_value >= level
    }
}

fn chi_square_tail(statistic: f64, dof: usize) -> Result<f64> {
    if dof == 0 {
        return Ok(1.0);
    }
    let d = ChiSquared::new(dof as f64).map_err(|e| Error::domain(e.to_string()))?;
    Ok(d.sf(statistic))
}

/// Merges cells (in index order) until each group's weight reaches `min`;
/// a light remainder joins the last group.
fn pool(weights: &[f64], min: f64) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut current = Vec::new();
    let mut acc = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        current.push(i);
        acc += w;
        if acc >= min {
            groups.push(std::mem::take(&mut current));
            acc = 0.0;
        }
    }
    if !current.is_empty() {
        match groups.last_mut() {
            Some(g) => g.extend(current),
            None => groups.push(current),
        }
    }
    groups
}

/// Pearson chi-square test of `counts` against cell probabilities `probs`.
///
/// Probabilities are renormalised to sum to one, so a truncated support
/// should carry its tail mass in a final cell. Adjacent cells are pooled
/// until every expected count is at least [`MIN_EXPECTED`].
pub fn chi_square_gof(counts: &[u64], probs: &[f64]) -> Result<TestResult> {
    if counts.len() != probs.len() || counts.is_empty() {
        return Err(Error::domain(
            "counts and probabilities must have the same non-zero length",
        ));
    }
    if probs.iter().any(|&p| !(p >= 0.0)) {
        return Err(Error::domain("cell probabilities must be non-negative"));
    }
    let n: u64 = counts.iter().sum();
    let total: f64 = probs.iter().sum();
    if n == 0 || !(total > 0.0) {
        return Err(Error::domain("empty sample or zero probability mass"));
    }
    let expected: Vec<f64> = probs.iter().map(|p| n as f64 * p / total).collect();
    let groups = pool(&expected, MIN_EXPECTED);
    let mut statistic = 0.0;
    for g in &groups {
        let e: f64 = g.iter().map(|&i| expected[i]).sum();
        let o: f64 = g.iter().map(|&i| counts[i] as f64).sum();
        if e > 0.0 {
            statistic += (o - e).powi(2) / e;
        } else if o > 0.0 {
            statistic = f64::INFINITY;
        }
    }
    let dof = groups.len() - 1;
    Ok(TestResult {
        statistic,
        dof: dof as f64,
        p_value: chi_square_tail(statistic, dof)?,
    })
}

/// Two-sample chi-square test that `a` and `b` come from the same
/// distribution on a common set of cells.
pub fn two_sample_chi_square(a: &[u64], b: &[u64]) -> Result<TestResult> {
    let len = a.len().max(b.len());
    let get = |v: &[u64], i: usize| v.get(i).copied().unwrap_or(0) as f64;
    let (na, nb): (f64, f64) = (a.iter().sum::<u64>() as f64, b.iter().sum::<u64>() as f64);
    if na == 0.0 || nb == 0.0 {
        return Err(Error::domain("both samples must be non-empty"));
    }
    let combined: Vec<f64> = (0..len).map(|i| get(a, i) + get(b, i)).collect();
    let groups = pool(&combined, 2.0 * MIN_EXPECTED);
    let (ka, kb) = ((nb / na).sqrt(), (na / nb).sqrt());
    let mut statistic = 0.0;
    for g in &groups {
        let x: f64 = g.iter().map(|&i| get(a, i)).sum();
        let y: f64 = g.iter().map(|&i| get(b, i)).sum();
        if x + y > 0.0 {
            statistic += (ka * x - kb * y).powi(2) / (x + y);
        }
    }
    let dof = groups.len() - 1;
    Ok(TestResult {
        statistic,
        dof: dof as f64,
        p_value: chi_square_tail(statistic, dof)?,
    })
}

/// Kolmogorov distribution tail `Q(λ) = 2 Σ_{k≥1} (-1)^{k-1} e^{-2k²λ²}`.
fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// One-sample Kolmogorov–Smirnov test against a continuous `cdf`, with
/// Stephens' small-sample correction of the asymptotic p-value.
pub fn ks_test(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<TestResult> {
    if samples.is_empty() {
        return Err(Error::domain("KS test needs at least one sample"));
    }
    let mut x = samples.to_vec();
    x.sort_by(|a, b| a.total_cmp(b));
    let n = x.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &xi) in x.iter().enumerate() {
        let f = cdf(xi);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    let sn = n.sqrt();
    Ok(TestResult {
        statistic: d,
        dof: n,
        p_value: kolmogorov_q((sn + 0.12 + 0.11 / sn) * d),
    })
}
