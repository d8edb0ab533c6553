//! Mittag-Leffler and Wright functions on the real axis.
//!
//! `E_{ν,γ}(x) = Σ_h x^h / Γ(νh + γ)` is evaluated in one of three regimes:
//!
//! * the power series (compensated), for `|x| ≤ 5` when its cancellation
//!   estimate allows it;
//! * the asymptotic expansion `Σ_k (-1)^{k+1} |x|^{-k} / Γ(γ - νk)` for
//!   `x ≤ -50`;
//! * an integral representation evaluated by adaptive quadrature, for
//!   everything in between (and as a fallback).
//!
//! Every regime returns its own error estimate and the smallest one wins.

use std::cell::Cell;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{self, QuadOptions};
use crate::summation::CompensatedSum;

/// Largest `|x|` for which the power series is attempted.
pub const SERIES_MAX_ABS_X: f64 = 5.0;
/// Smallest `-x` for which the asymptotic expansion is attempted.
pub const ASYMPTOTIC_MIN_ABS_X: f64 = 50.0;

pub const ENV_ABS_TOL: &str = "FRACDEATH_ABS_TOL";
pub const ENV_MAX_TERMS: &str = "FRACDEATH_MAX_TERMS";

/// Order `ν ∈ (0, 1]` of the fractional time derivative.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct FractionalOrder(f64);

impl FractionalOrder {
    pub const CLASSICAL: FractionalOrder = FractionalOrder(1.0);

    pub fn new(nu: f64) -> Result<Self> {
        if nu > 0.0 && nu <= 1.0 {
            Ok(Self(nu))
        } else {
            Err(Error::domain(format!("fractional order must lie in (0, 1], got {nu}")))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn is_classical(self) -> bool {
        self.0 == 1.0
    }
}

impl TryFrom<f64> for FractionalOrder {
    type Error = Error;
    fn try_from(nu: f64) -> Result<Self> {
        Self::new(nu)
    }
}

impl From<FractionalOrder> for f64 {
    fn from(nu: FractionalOrder) -> f64 {
        nu.0
    }
}

impl std::fmt::Display for FractionalOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccuracySpec {
    pub abs_tol: f64,
    pub max_terms: usize,
}

impl Default for AccuracySpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            max_terms: 10_000,
        }
    }
}

impl AccuracySpec {
    pub fn new(abs_tol: f64, max_terms: usize) -> Result<Self> {
        if !(abs_tol > 0.0) || !abs_tol.is_finite() {
            return Err(Error::domain(format!("abs_tol must be positive, got {abs_tol}")));
        }
        if max_terms == 0 {
            return Err(Error::domain("max_terms must be at least 1"));
        }
        Ok(Self { abs_tol, max_terms })
    }

    /// Defaults, overridden by `FRACDEATH_ABS_TOL` / `FRACDEATH_MAX_TERMS`
    /// when those are set.
    pub fn from_env() -> Result<Self> {
        let mut acc = Self::default();
        if let Ok(v) = std::env::var(ENV_ABS_TOL) {
            acc.abs_tol = v
                .trim()
                .parse()
                .map_err(|_| Error::domain(format!("{ENV_ABS_TOL}={v} is not a number")))?;
        }
        if let Ok(v) = std::env::var(ENV_MAX_TERMS) {
            acc.max_terms = v
                .trim()
                .parse()
                .map_err(|_| Error::domain(format!("{ENV_MAX_TERMS}={v} is not an integer")))?;
        }
        Self::new(acc.abs_tol, acc.max_terms)
    }
}

/// Validated argument triple `(ν, γ, x)` of `E_{ν,γ}(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MLArgument {
    nu: FractionalOrder,
    gamma: f64,
    x: f64,
}

impl MLArgument {
    /// `x > 0` is accepted (the growing branch) but only the power series
    /// serves it, so large positive arguments are best-effort.
    pub fn new(nu: FractionalOrder, gamma: f64, x: f64) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::domain(format!("gamma must be positive, got {gamma}")));
        }
        if !x.is_finite() {
            return Err(Error::domain(format!("argument must be finite, got {x}")));
        }
        Ok(Self { nu, gamma, x })
    }

    pub fn nu(&self) -> FractionalOrder {
        self.nu
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn x(&self) -> f64 {
        self.x
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    Exact,
    Series,
    Asymptotic,
    Integral,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MLEvaluation {
    pub value: f64,
    pub error_estimate: f64,
    pub regime: Regime,
}

/// `1 / Γ(x)`, zero at the poles.
pub fn rgamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return 0.0;
    }
    if x > 171.7 {
        return 0.0;
    }
    1.0 / libm::tgamma(x)
}

pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// Binomial coefficient as a float; exact for `n ≤ 120`.
pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    if n <= 120 {
        let mut c: u128 = 1;
        for i in 0..k as u128 {
            c = c * (n as u128 - i) / (i + 1);
        }
        c as f64
    } else {
        let ln = libm::lgamma(n as f64 + 1.0) - libm::lgamma(k as f64 + 1.0) - libm::lgamma((n - k) as f64 + 1.0);
        ln.exp().round()
    }
}

/// `E_{ν,γ}(x)` to absolute accuracy `acc.abs_tol`.
pub fn mittag_leffler(arg: &MLArgument, acc: &AccuracySpec) -> Result<f64> {
    mittag_leffler_eval(arg, acc).map(|e| e.value)
}

/// One-parameter function `E_{ν,1}(x)`.
pub fn ml_one_param(nu: FractionalOrder, x: f64, acc: &AccuracySpec) -> Result<f64> {
    mittag_leffler(&MLArgument::new(nu, 1.0, x)?, acc)
}

/// Like [`mittag_leffler`], also reporting which regime produced the value
/// and its error estimate.
pub fn mittag_leffler_eval(arg: &MLArgument, acc: &AccuracySpec) -> Result<MLEvaluation> {
    let (nu, g, x) = (arg.nu.value(), arg.gamma, arg.x);
    let tol = acc.abs_tol;
    if x == 0.0 {
        return Ok(exact(rgamma(g)));
    }
    if nu == 1.0 && g == 1.0 {
        return Ok(exact(x.exp()));
    }
    if x > 0.0 {
        return ml_series(arg, acc);
    }

    fn consider(best: &mut Option<MLEvaluation>, candidate: Result<MLEvaluation>) {
        if let Ok(c) = candidate {
            if best.map_or(true, |b| c.error_estimate < b.error_estimate) {
                *best = Some(c);
            }
        }
    }

    let mut best = None;
    if -x <= SERIES_MAX_ABS_X && series_prescreen(nu, g, x) <= tol {
        consider(&mut best, ml_series(arg, acc));
    }
    if -x >= ASYMPTOTIC_MIN_ABS_X && nu < 1.0 {
        consider(&mut best, ml_asymptotic(arg, acc));
    }
    if best.map_or(true, |b| b.error_estimate > tol) {
        consider(&mut best, ml_integral(arg, acc));
    }
    match best {
        Some(b) if b.error_estimate <= tol => Ok(b),
        Some(b) => Err(Error::NonConvergence {
            tolerance: tol,
            estimate: b.error_estimate,
        }),
        None => Err(Error::NonConvergence {
            tolerance: tol,
            estimate: f64::INFINITY,
        }),
    }
}

fn exact(value: f64) -> MLEvaluation {
    MLEvaluation {
        value,
        error_estimate: 0.0,
        regime: Regime::Exact,
    }
}

/// Round-off bound for the series from the leading growth of
/// `Σ |x|^h / Γ(νh+γ) ≈ ν⁻¹ |x|^{(1-γ)/ν} exp(|x|^{1/ν})`.
fn series_prescreen(nu: f64, g: f64, x: f64) -> f64 {
    // the growth estimate only holds for large |x|; below 1 the sum is
    // bounded by its value at 1
    let y = x.abs().max(1.0);
    let ln_mag = y.powf(1.0 / nu) + ((1.0 - g) / nu) * y.ln() - nu.ln();
    f64::EPSILON * ln_mag.max(0.0).exp()
}

/// Power-series regime.
pub fn ml_series(arg: &MLArgument, acc: &AccuracySpec) -> Result<MLEvaluation> {
    let (nu, g, x) = (arg.nu.value(), arg.gamma, arg.x);
    if x == 0.0 {
        return Ok(exact(rgamma(g)));
    }
    let y = x.abs();
    let ln_y = y.ln();
    let peak = y.powf(1.0 / nu);
    if x > 0.0 && peak > 700.0 {
        // exp(|x|^{1/ν}) overflows
        return Err(Error::NonConvergence {
            tolerance: acc.abs_tol,
            estimate: f64::INFINITY,
        });
    }
    let mut sum = CompensatedSum::new();
    let mut round = 0.0;
    for h in 0..acc.max_terms {
        let hf = h as f64;
        let a = nu * hf + g;
        let (term, rel) = if a < 170.0 && hf * ln_y < 700.0 {
            let p = y.powi(h as i32);
            (p * rgamma(a), (3.0 + hf.max(1.0).log2()) * f64::EPSILON)
        } else {
            let (lg, _) = libm::lgamma_r(a);
            let e = hf * ln_y - lg;
            (e.exp(), (2.0 + e.abs() + lg.abs()) * f64::EPSILON)
        };
        let signed = if x < 0.0 && h % 2 == 1 { -term } else { term };
        sum.add(signed);
        round += term * rel;
        let tol = if x > 0.0 {
            acc.abs_tol.max(1e-16 * sum.value().abs())
        } else {
            acc.abs_tol
        };
        if h >= 2 && nu * hf > peak + 1.0 && term < 1e-3 * tol {
            return Ok(MLEvaluation {
                value: sum.value(),
                error_estimate: round + 4.0 * f64::EPSILON * sum.magnitude() + term,
                regime: Regime::Series,
            });
        }
    }
    Err(Error::NonConvergence {
        tolerance: acc.abs_tol,
        estimate: f64::INFINITY,
    })
}

/// Asymptotic expansion for `x → -∞`, `0 < ν < 1`. The expansion is
/// truncated at its smallest term, whose magnitude is the error estimate.
pub fn ml_asymptotic(arg: &MLArgument, acc: &AccuracySpec) -> Result<MLEvaluation> {
    let (nu, g, x) = (arg.nu.value(), arg.gamma, arg.x);
    if !(x < 0.0) || nu >= 1.0 {
        return Err(Error::domain("asymptotic expansion needs x < 0 and 0 < nu < 1"));
    }
    let y = -x;
    let mut sum = CompensatedSum::new();
    let mut prev_nonzero = f64::INFINITY;
    let mut inv_pow = 1.0;
    for k in 1..=acc.max_terms {
        inv_pow /= y;
        let coef = rgamma(g - nu * k as f64);
        let term = inv_pow * coef;
        if term == 0.0 && coef == 0.0 {
            continue;
        }
        if term.abs() > prev_nonzero || inv_pow == 0.0 {
            // series starts to diverge (or underflowed): stop at the smallest term
            return Ok(MLEvaluation {
                value: sum.value(),
                error_estimate: prev_nonzero + 4.0 * f64::EPSILON * sum.magnitude(),
                regime: Regime::Asymptotic,
            });
        }
        if term.abs() < 1e-3 * acc.abs_tol {
            return Ok(MLEvaluation {
                value: sum.value(),
                error_estimate: term.abs() + 4.0 * f64::EPSILON * sum.magnitude(),
                regime: Regime::Asymptotic,
            });
        }
        sum.add(if k % 2 == 1 { term } else { -term });
        prev_nonzero = term.abs();
    }
    Err(Error::NonConvergence {
        tolerance: acc.abs_tol,
        estimate: prev_nonzero,
    })
}

/// Integral-representation regime for `x < 0`.
///
/// For `0 < ν < 1` and `γ < 1 + ν`:
///
/// ```text
/// E_{ν,γ}(-x) = ∫₀^∞ (νπ)⁻¹ χ^{(1-γ)/ν} exp(-χ^{1/ν})
///               [χ sin(π(1-γ)) + x sin(π(1-γ+ν))] / (χ² + 2χx cos(νπ) + x²) dχ
/// ```
///
/// Larger `γ` is reduced with `E_{ν,γ}(z) = (E_{ν,γ-ν}(z) - 1/Γ(γ-ν)) / z`.
/// For `ν = 1` the Euler integral `E_{1,γ}(z) = Γ(γ)⁻¹ ∫₀¹ exp(z(1 - w^{1/(γ-1)})) dw`
/// is used instead.
pub fn ml_integral(arg: &MLArgument, acc: &AccuracySpec) -> Result<MLEvaluation> {
    let (nu, g, x) = (arg.nu.value(), arg.gamma, arg.x);
    if !(x < 0.0) {
        return Err(Error::domain("integral representation needs x < 0"));
    }
    if nu == 1.0 {
        return ml_integral_classical(g, x, acc);
    }
    if g >= 1.0 + nu {
        let lower = MLArgument::new(arg.nu, g - nu, x)?;
        let inner_acc = AccuracySpec {
            abs_tol: acc.abs_tol * x.abs(),
            ..*acc
        };
        let e = ml_integral(&lower, &inner_acc)?;
        return Ok(MLEvaluation {
            value: (e.value - rgamma(g - nu)) / x,
            error_estimate: e.error_estimate / x.abs() + f64::EPSILON * e.value.abs() / x.abs(),
            regime: Regime::Integral,
        });
    }

    let y = -x;
    let sin_a = (PI * (1.0 - g)).sin();
    let sin_b = (PI * (1.0 - g + nu)).sin();
    let cos_nu = (PI * nu).cos();
    let pref = 1.0 / (nu * PI);
    let p = (1.0 - g) / nu;
    let chi_max = 60f64.powf(nu);
    let kernel = |chi: f64| -> f64 {
        let num = chi * sin_a + y * sin_b;
        let den = chi * chi + 2.0 * chi * y * cos_nu + y * y;
        pref * (-chi.powf(1.0 / nu)).exp() * num / den
    };

    let mut chi_breaks = vec![0.0, chi_max.min(1.0), chi_max];
    if cos_nu < 0.0 {
        let peak = -y * cos_nu;
        let width = y * (PI * nu).sin();
        for c in [peak - 2.0 * width, peak - width, peak, peak + width, peak + 2.0 * width] {
            if c > 0.0 && c < chi_max {
                chi_breaks.push(c);
            }
        }
    }
    chi_breaks.sort_by(f64::total_cmp);
    chi_breaks.dedup();

    let opts = QuadOptions::new(0.5 * acc.abs_tol, 1e-15);
    let result = if p < 0.0 {
        // χ = s^{1/(1+p)} removes the integrable χ^p singularity at 0
        let q = 1.0 / (1.0 + p);
        let s_breaks: Vec<f64> = chi_breaks.iter().map(|c| c.powf(1.0 + p)).collect();
        quadrature::integrate_with_breaks(
            |s: f64| {
                if s <= 0.0 {
                    return 0.0;
                }
                q * kernel(s.powf(q))
            },
            &s_breaks,
            &opts,
        )?
    } else {
        quadrature::integrate_with_breaks(|chi: f64| chi.powf(p) * kernel(chi), &chi_breaks, &opts)?
    };
    Ok(MLEvaluation {
        value: result.value,
        error_estimate: result.error,
        regime: Regime::Integral,
    })
}

fn ml_integral_classical(g: f64, x: f64, acc: &AccuracySpec) -> Result<MLEvaluation> {
    if g == 1.0 {
        return Ok(exact(x.exp()));
    }
    if g < 1.0 {
        // E_{1,γ}(z) = 1/Γ(γ) + z E_{1,γ+1}(z)
        let inner_acc = AccuracySpec {
            abs_tol: acc.abs_tol / x.abs(),
            ..*acc
        };
        let e = ml_integral_classical(g + 1.0, x, &inner_acc)?;
        return Ok(MLEvaluation {
            value: rgamma(g) + x * e.value,
            error_estimate: e.error_estimate * x.abs() + f64::EPSILON * (x * e.value).abs(),
            regime: Regime::Integral,
        });
    }
    let q = 1.0 / (g - 1.0);
    let scale = rgamma(g);
    let opts = QuadOptions::new(0.5 * acc.abs_tol / scale.abs().max(1e-300), 1e-15);
    let mut breaks = vec![0.0, 1.0];
    // the integrand drops from 1 to e^{-1} where w^q ≈ 1/|x|
    let knee = (1.0 / x.abs()).powf(g - 1.0);
    if knee > 0.0 && knee < 1.0 {
        breaks.insert(1, knee);
    }
    let r = quadrature::integrate_with_breaks(|w: f64| (x * (1.0 - w.powf(q))).exp(), &breaks, &opts)?;
    Ok(MLEvaluation {
        value: scale * r.value,
        error_estimate: scale.abs() * r.error,
        regime: Regime::Integral,
    })
}

/// Density `W_{-ν,1-ν}(-ξ)` of the Wright-distributed mixing variable.
///
/// Small `ξ` use the defining series; otherwise the density is computed from
/// `Ξ = (E / A(U))^{1-ν}` with `U ~ U(0, π)`, `E ~ Exp(1)` and Zolotarev's
/// function `A`, which gives a positive integrand on `(0, π)`.
pub fn wright_density(nu: FractionalOrder, xi: f64, acc: &AccuracySpec) -> Result<f64> {
    let v = nu.value();
    if nu.is_classical() {
        return Err(Error::domain("Wright density degenerates to a point mass at nu = 1"));
    }
    if !(xi >= 0.0) || !xi.is_finite() {
        return Err(Error::domain(format!("wright_density needs xi >= 0, got {xi}")));
    }
    if xi == 0.0 {
        return Ok(rgamma(1.0 - v));
    }
    let tol = acc.abs_tol;
    let series = if xi <= 3.0 {
        wright_series(v, xi, acc).ok()
    } else {
        None
    };
    if let Some((value, est)) = series {
        if est <= 0.1 * tol {
            return Ok(value.max(0.0));
        }
    }
    let integral = wright_integral(v, xi, acc);
    match (series, integral) {
        (Some((sv, se)), Ok((iv, ie))) => {
            let (value, est) = if se < ie { (sv, se) } else { (iv, ie) };
            if est <= tol {
                Ok(value.max(0.0))
            } else {
                Err(Error::NonConvergence {
                    tolerance: tol,
                    estimate: est,
                })
            }
        }
        (_, Ok((iv, ie))) if ie <= tol => Ok(iv),
        (Some((sv, se)), Err(_)) if se <= tol => Ok(sv.max(0.0)),
        (_, Ok((_, ie))) => Err(Error::NonConvergence {
            tolerance: tol,
            estimate: ie,
        }),
        (_, Err(e)) => Err(e),
    }
}

fn wright_series(nu: f64, xi: f64, acc: &AccuracySpec) -> Result<(f64, f64)> {
    let mut sum = CompensatedSum::new();
    let mut term_pow = 1.0; // ξ^r / r!
    let mut small = 0;
    for r in 0..acc.max_terms {
        if r > 0 {
            term_pow *= xi / r as f64;
        }
        let c = rgamma(1.0 - nu * (r as f64 + 1.0));
        let term = term_pow * c;
        sum.add(if r % 2 == 1 { -term } else { term });
        if term.abs() < 1e-3 * acc.abs_tol && r > 5 {
            small += 1;
            if small > 3 {
                return Ok((sum.value(), 8.0 * f64::EPSILON * sum.magnitude() + term.abs()));
            }
        } else {
            small = 0;
        }
    }
    Err(Error::NonConvergence {
        tolerance: acc.abs_tol,
        estimate: f64::INFINITY,
    })
}

/// `ln A(u)` for Zolotarev's function
/// `A(u) = sin(νu)^{ν/(1-ν)} sin((1-ν)u) / sin(u)^{1/(1-ν)}`.
pub(crate) fn ln_zolotarev(nu: f64, u: f64) -> f64 {
    let r = nu / (1.0 - nu);
    r * (nu * u).sin().ln() + ((1.0 - nu) * u).sin().ln() - (u.sin().ln()) / (1.0 - nu)
}

fn wright_integral(nu: f64, xi: f64, acc: &AccuracySpec) -> Result<(f64, f64)> {
    let ln_xi = xi.ln();
    let scale = 1.0 / (xi * (1.0 - nu) * PI);
    // integrand y e^{-y} with y = A(u) ξ^{1/(1-ν)}
    let ln_y = |u: f64| ln_zolotarev(nu, u) + ln_xi / (1.0 - nu);
    let f = |u: f64| {
        let l = ln_y(u);
        if !l.is_finite() || l > 7.0 {
            return 0.0;
        }
        (l - l.exp()).exp()
    };
    // y is increasing in u; locate y = 1 to split the range at the peak
    let mut breaks = vec![0.0, PI];
    let (mut lo, mut hi) = (1e-12, PI - 1e-12);
    if ln_y(lo) < 0.0 && ln_y(hi) > 0.0 {
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if ln_y(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        breaks.insert(1, 0.5 * (lo + hi));
    }
    let opts = QuadOptions::new(0.25 * acc.abs_tol / scale, 1e-13);
    let r = quadrature::integrate_with_breaks(f, &breaks, &opts)?;
    Ok((scale * r.value, scale * r.error))
}

/// `E[g(Ξ)]` for `Ξ` with density `W_{-ν,1-ν}(-ξ)`.
///
/// Uses `Ξ = (E / A(U))^{1-ν}`, so the expectation is the double integral
/// `π⁻¹ ∫₀^π ∫₀^∞ e^{-e} g((e / A(u))^{1-ν}) de du`. For a non-negative `g`
/// nothing cancels. At `ν = 1` the law is a point mass and `g(1)` is returned.
pub fn wright_expectation<G: Fn(f64) -> f64>(nu: FractionalOrder, g: G, acc: &AccuracySpec) -> Result<f64> {
    if nu.is_classical() {
        return Ok(g(1.0));
    }
    let v = nu.value();
    let inner_opts = QuadOptions::new(0.1 * acc.abs_tol, 1e-13);
    let failure: Cell<Option<Error>> = Cell::new(None);
    let inner = |u: f64| -> f64 {
        if u <= 0.0 || u >= PI {
            return 0.0;
        }
        let ln_a = ln_zolotarev(v, u);
        let r = quadrature::integrate_to_infinity(
            |e: f64| {
                if e <= 0.0 {
                    return g(0.0);
                }
                let xi = ((e.ln() - ln_a) * (1.0 - v)).exp();
                (-e).exp() * g(xi)
            },
            0.0,
            &inner_opts,
        );
        match r {
            Ok(r) => r.value,
            Err(e) => {
                failure.set(Some(e));
                0.0
            }
        }
    };
    let outer = quadrature::integrate(inner, 0.0, PI, &QuadOptions::new(PI * acc.abs_tol, 1e-13));
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok(outer?.value / PI)
}

/// Both sides of `∫₀^∞ e^{-zt} t^{γ-1} E_{ν,γ}(-θ t^ν) dt = z^{ν-γ} / (z^ν + θ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaplaceCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub abs_diff: f64,
}

pub fn ml_laplace_check(
    nu: FractionalOrder,
    gamma: f64,
    theta: f64,
    z: f64,
    acc: &AccuracySpec,
) -> Result<LaplaceCheck> {
    let v = nu.value();
    if !(z > theta.abs().powf(1.0 / v)) {
        return Err(Error::domain(format!(
            "Laplace pair needs z > |theta|^(1/nu), got z = {z}, theta = {theta}"
        )));
    }
    if !(gamma > 0.0) {
        return Err(Error::domain("gamma must be positive"));
    }
    let failure: Cell<Option<Error>> = Cell::new(None);
    let ml = |t: f64| -> f64 {
        match MLArgument::new(nu, gamma, -theta * t.powf(v)).and_then(|a| mittag_leffler(&a, acc)) {
            Ok(e) => e,
            Err(e) => {
                failure.set(Some(e));
                f64::NAN
            }
        }
    };
    let opts = QuadOptions::new(1e-11, 1e-10);
    // [0, 1] with t = s^{1/γ} so that t^{γ-1} dt = ds / γ
    let head = quadrature::integrate(
        |s: f64| {
            if s <= 0.0 {
                return ml(0.0) * (0.0f64).exp() / gamma;
            }
            let t = s.powf(1.0 / gamma);
            (-z * t).exp() * ml(t) / gamma
        },
        0.0,
        1.0,
        &opts,
    );
    let tail = quadrature::integrate_to_infinity(|t: f64| (-z * t).exp() * t.powf(gamma - 1.0) * ml(t), 1.0, &opts);
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let lhs = head?.value + tail?.value;
    let rhs = z.powf(v - gamma) / (z.powf(v) + theta);
    Ok(LaplaceCheck {
        lhs,
        rhs,
        abs_diff: (lhs - rhs).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nu(v: f64) -> FractionalOrder {
        FractionalOrder::new(v).unwrap()
    }

    fn ml(v: f64, g: f64, x: f64) -> f64 {
        mittag_leffler(&MLArgument::new(nu(v), g, x).unwrap(), &AccuracySpec::default()).unwrap()
    }

    #[test]
    fn order_validation() {
        assert!(FractionalOrder::new(0.0).is_err());
        assert!(FractionalOrder::new(1.0001).is_err());
        assert!(FractionalOrder::new(f64::NAN).is_err());
        assert!(FractionalOrder::new(1.0).unwrap().is_classical());
    }

    #[test]
    fn argument_validation() {
        assert!(MLArgument::new(nu(0.5), 0.0, -1.0).is_err());
        assert!(MLArgument::new(nu(0.5), 1.0, f64::NEG_INFINITY).is_err());
        assert!(AccuracySpec::new(0.0, 10).is_err());
        assert!(AccuracySpec::new(1e-10, 0).is_err());
    }

    #[test]
    fn exponential_case() {
        assert!((ml(1.0, 1.0, -2.0) - 0.135_335_283_236_612_7).abs() < 1e-15);
        assert_eq!(ml(0.7, 1.0, 0.0), 1.0);
        assert_eq!(ml(1.0, 1.0, 0.0), 1.0);
    }

    #[test]
    fn half_order_matches_erfc_form() {
        // E_{1/2}(-x) = exp(x²) erfc(x)
        for &x in &[0.3f64, 1.0, 2.5, 4.0, 7.0, 12.0, 25.0] {
            let expected = (x * x).exp() * libm::erfc(x);
            let got = ml(0.5, 1.0, -x);
            assert!((got - expected).abs() < 1e-12, "x={x}: {got} vs {expected}");
        }
    }

    #[test]
    fn gamma_reduction_identity() {
        // E_{ν,1}(z) = 1 + z E_{ν,ν+1}(z)
        for &(v, x) in &[(0.7, -3.0), (0.4, -11.0), (0.9, -70.0)] {
            let lhs = ml(v, 1.0, x);
            let rhs = 1.0 + x * ml(v, 1.0 + v, x);
            assert!((lhs - rhs).abs() < 1e-10, "nu={v} x={x}");
        }
    }

    #[test]
    fn non_convergence_reported() {
        let acc = AccuracySpec::new(1e-12, 3).unwrap();
        let arg = MLArgument::new(nu(0.5), 1.0, 2.0).unwrap();
        assert!(matches!(mittag_leffler(&arg, &acc), Err(Error::NonConvergence { .. })));
    }

    #[test]
    fn growing_branch_overflow_is_an_error() {
        let arg = MLArgument::new(nu(0.3), 1.0, 30.0).unwrap();
        assert!(mittag_leffler(&arg, &AccuracySpec::default()).is_err());
    }

    #[test]
    fn wright_density_values() {
        let acc = AccuracySpec::default();
        let w0 = wright_density(nu(0.5), 0.0, &acc).unwrap();
        assert!((w0 - 0.564_189_583_547_756_3).abs() < 1e-15);
        for &xi in &[0.5f64, 1.0, 2.0, 4.0, 9.0] {
            let got = wright_density(nu(0.5), xi, &acc).unwrap();
            let expected = (-xi * xi / 4.0).exp() / PI.sqrt();
            assert!((got - expected).abs() < 1e-12, "xi={xi}: {got} vs {expected}");
        }
        assert!(wright_density(nu(1.0), 1.0, &acc).is_err());
        assert!(wright_density(nu(0.5), -1.0, &acc).is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(64, 32), 1_832_624_140_942_590_534f64);
        assert_eq!(binomial(3, 4), 0.0);
        assert_eq!(binomial(0, 0), 1.0);
    }

    #[test]
    fn rgamma_poles() {
        assert_eq!(rgamma(0.0), 0.0);
        assert_eq!(rgamma(-3.0), 0.0);
        assert!((rgamma(0.5) - 1.0 / PI.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn order_serde_validates() {
        let ok: FractionalOrder = serde_json::from_str("0.7").unwrap();
        assert_eq!(ok.value(), 0.7);
        assert!(serde_json::from_str::<FractionalOrder>("1.5").is_err());
    }

    #[test]
    fn wright_expectation_moments() {
        // E Ξ = 1/Γ(1+ν), E e^{-Ξ} = E_{ν,1}(-1)
        let acc = AccuracySpec::default();
        for &v in &[0.3, 0.5, 0.8] {
            let m = wright_expectation(nu(v), |x| x, &acc).unwrap();
            assert!((m - rgamma(1.0 + v)).abs() < 1e-10, "nu={v}: {m}");
            let l = wright_expectation(nu(v), |x| (-x).exp(), &acc).unwrap();
            assert!((l - ml(v, 1.0, -1.0)).abs() < 1e-11, "nu={v}: {l}");
        }
        assert_eq!(wright_expectation(nu(1.0), |x| 3.0 * x, &acc).unwrap(), 3.0);
    }
}
