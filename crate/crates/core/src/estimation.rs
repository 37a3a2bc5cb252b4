//! Monte Carlo sampling from catalogued distributions and the log-log
//! least-squares fit of the power form `ψ(x) = x^(1−β)/(cβ)` to the
//! empirical mean excess.
//!
//! Draws use `ChaCha8Rng::seed_from_u64(seed)` as a single stream: one
//! `Open01` variate `U` per sample, inverted through `F̄(x) = 1 − U`.

use std::io::{BufRead, Write};

use log::warn;
use rand::distributions::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::dist_catalog::{DistributionSpec, Family};
use crate::numerics::bisect_decreasing;
use crate::scalar::Scalar;

/// Minimum number of exceedances for a threshold to be used.
pub const K_MIN: usize = 50;
/// Minimum number of thresholds surviving in a fit.
pub const MIN_FIT_POINTS: usize = 5;
/// Residual level above which a fit is flagged as a poor match for the power form.
pub const RESIDUAL_WARN: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimationError {
    #[error("need at least one sample")]
    NoSamples,
    #[error("cannot bracket the quantile for ln V = {target}")]
    NoBracket { target: f64 },
    #[error("threshold {u} has {count} exceedances, need {min}")]
    TooFewExceedances { u: f64, count: usize, min: usize },
    #[error("threshold grid must have at least {min} strictly increasing positive points")]
    BadGrid { min: usize },
    #[error("only {got} thresholds left after dropping sparse ones, need {min}")]
    TooFewThresholds { got: usize, min: usize },
    #[error("fitted beta = 1 - slope is not positive (slope {slope}, intercept {intercept})")]
    NonPositiveBeta { slope: f64, intercept: f64 },
    #[error("sample file line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for EstimationError {
    fn from(e: std::io::Error) -> Self {
        EstimationError::Io(e.to_string())
    }
}

/// Reproducible i.i.d. draws.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet<T> {
    pub dist_id: String,
    pub n: usize,
    pub seed: u64,
    pub values: Vec<T>,
}

/// Draws `n` values from `spec` with the given seed.
pub fn sample<T: Scalar>(spec: &DistributionSpec<T>, n: usize, seed: u64) -> Result<SampleSet<T>, EstimationError> {
    if n == 0 {
        return Err(EstimationError::NoSamples);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(n);
    for _ in 0..n {
        let u: f64 = rng.sample(Open01);
        values.push(inverse_survival(spec, T::lit(1.0 - u))?);
    }
    Ok(SampleSet { dist_id: spec.to_string(), n, seed, values })
}

/// Solves `F̄(x) = v` for `v ∈ (0, 1)`.
pub fn inverse_survival<T: Scalar>(spec: &DistributionSpec<T>, v: T) -> Result<T, EstimationError> {
    let one = T::one();
    let lv = v.ln();
    match spec.family() {
        Family::ExponentialLike { lambda, k } => return Ok((k.ln() - lv) / lambda),
        Family::ParetoLike { alpha, k } => return Ok(((k.ln() - lv) / alpha).exp()),
        Family::ParetoLikeFinite { alpha, k, x_e } => return Ok(x_e - ((lv - k.ln()) / alpha).exp()),
        Family::Cauchy => return Ok(one / (T::PI() * v).tan()),
        Family::Gev { gamma } => {
            // F̄ = 1 − exp(−t); t = e^{−x} or (1+γx)^{−1/γ}
            let ln_t = (-(-v).ln_1p()).ln();
            return Ok(if gamma == T::zero() { -ln_t } else { (-gamma * ln_t).exp_m1() / gamma });
        }
        _ => {}
    }
    let f = |x: T| spec.log_survival(x);
    let lo = if spec.support_lo().is_finite() {
        spec.support_lo()
    } else {
        let mut lo = -one;
        while f(lo) < lv {
            lo = lo * T::lit(2.0);
            if !lo.is_finite() {
                return Err(EstimationError::NoBracket { target: lv.as_f64() });
            }
        }
        lo
    };
    let hi = if spec.x_e().is_finite() {
        spec.x_e()
    } else {
        let mut hi = lo.abs().max(one);
        while f(hi) >= lv {
            hi = hi * T::lit(2.0);
            if !hi.is_finite() {
                return Err(EstimationError::NoBracket { target: lv.as_f64() });
            }
        }
        hi
    };
    Ok(bisect_decreasing(f, lo, hi, lv))
}

/// Mean of `X − u` over the samples above `u`.
pub fn empirical_mean_excess<T: Scalar>(samples: &[T], u: T) -> Result<T, EstimationError> {
    let (sum, count) = samples
        .iter()
        .filter(|&&x| x > u)
        .fold((T::zero(), 0usize), |(s, c), &x| (s + (x - u), c + 1));
    if count < K_MIN {
        return Err(EstimationError::TooFewExceedances { u: u.as_f64(), count, min: K_MIN });
    }
    Ok(sum / T::lit(count as f64))
}

/// Power-form fit.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult<T> {
    pub c_hat: T,
    pub beta_hat: T,
    /// Thresholds used in the regression (sparse ones removed).
    pub threshold_grid: Vec<T>,
    /// Thresholds dropped for having fewer than [`K_MIN`] exceedances.
    pub dropped: Vec<T>,
    /// `(ln u_j, ln ê(u_j))`.
    pub log_log_points: Vec<(T, T)>,
    pub slope: T,
    pub intercept: T,
    pub residual_rms: T,
}

/// Ordinary least squares on `(ln u, ln ê(u))`: `β = 1 − slope`, `c = exp(−intercept)/β`.
pub fn fit_power_from_points<T: Scalar>(points: &[(T, T)]) -> Result<FitResult<T>, EstimationError> {
    if points.len() < MIN_FIT_POINTS
        || points.windows(2).any(|w| !(w[1].0 > w[0].0))
        || points.iter().any(|&(u, e)| !(u > T::zero() && e > T::zero()))
    {
        return Err(EstimationError::BadGrid { min: MIN_FIT_POINTS });
    }
    let ll: Vec<(T, T)> = points.iter().map(|&(u, e)| (u.ln(), e.ln())).collect();
    let n = T::lit(ll.len() as f64);
    let mx = ll.iter().map(|p| p.0).sum::<T>() / n;
    let my = ll.iter().map(|p| p.1).sum::<T>() / n;
    let sxy = ll.iter().map(|&(x, y)| (x - mx) * (y - my)).sum::<T>();
    let sxx = ll.iter().map(|&(x, _)| (x - mx) * (x - mx)).sum::<T>();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual_rms = (ll.iter().map(|&(x, y)| (y - intercept - slope * x).powi(2)).sum::<T>() / n).sqrt();
    let beta_hat = T::one() - slope;
    if !(beta_hat > T::zero()) {
        return Err(EstimationError::NonPositiveBeta { slope: slope.as_f64(), intercept: intercept.as_f64() });
    }
    if residual_rms > T::lit(RESIDUAL_WARN) {
        warn!("power-form fit residual {residual_rms} exceeds {RESIDUAL_WARN}; the form may not apply");
    }
    Ok(FitResult {
        c_hat: (-intercept).exp() / beta_hat,
        beta_hat,
        threshold_grid: points.iter().map(|p| p.0).collect(),
        dropped: Vec::new(),
        log_log_points: ll,
        slope,
        intercept,
        residual_rms,
    })
}

/// Fits the power form to the empirical mean excess at each threshold.
pub fn fit_power_psi<T: Scalar>(samples: &SampleSet<T>, thresholds: &[T]) -> Result<FitResult<T>, EstimationError> {
    if thresholds.len() < MIN_FIT_POINTS || thresholds.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(EstimationError::BadGrid { min: MIN_FIT_POINTS });
    }
    let mut pts = Vec::new();
    let mut dropped = Vec::new();
    for &u in thresholds {
        match empirical_mean_excess(&samples.values, u) {
            Ok(e) => pts.push((u, e)),
            Err(EstimationError::TooFewExceedances { count, .. }) => {
                warn!("dropping threshold {u}: {count} exceedances (< {K_MIN})");
                dropped.push(u);
            }
            Err(e) => return Err(e),
        }
    }
    if pts.len() < MIN_FIT_POINTS {
        return Err(EstimationError::TooFewThresholds { got: pts.len(), min: MIN_FIT_POINTS });
    }
    let mut fit = fit_power_from_points(&pts)?;
    fit.dropped = dropped;
    Ok(fit)
}

/// Empirical quantile by linear interpolation between order statistics.
fn quantile<T: Scalar>(sorted: &[T], p: f64) -> T {
    let h = p * (sorted.len() - 1) as f64;
    let i = h.floor() as usize;
    let j = (i + 1).min(sorted.len() - 1);
    sorted[i] + (sorted[j] - sorted[i]) * T::lit(h - i as f64)
}

/// Eight thresholds from the 50th to the 99th sample percentile: geometric
/// when the 50th percentile is positive, evenly spaced otherwise.
pub fn default_threshold_grid<T: Scalar>(samples: &[T]) -> Vec<T> {
    const COUNT: usize = 8;
    let mut sorted: Vec<T> = samples.iter().copied().filter(|v| !v.is_nan()).collect();
    if sorted.is_empty() {
        return Vec::new();
    }
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("NaN filtered"));
    let lo = quantile(&sorted, 0.50);
    let hi = quantile(&sorted, 0.99);
    (0..COUNT)
        .map(|k| {
            let t = T::lit(k as f64 / (COUNT - 1) as f64);
            if lo > T::zero() {
                (lo.ln() + (hi.ln() - lo.ln()) * t).exp()
            } else {
                lo + (hi - lo) * t
            }
        })
        .collect()
}

/// Writes one value per line (shortest round-trip representation).
pub fn write_samples<T: Scalar, W: Write>(values: &[T], mut out: W) -> Result<(), EstimationError> {
    for v in values {
        writeln!(out, "{v}")?;
    }
    out.flush()?;
    Ok(())
}

/// Reads one value per line; blank lines and `#` comments are skipped.
pub fn read_samples<T: Scalar, R: BufRead>(input: R) -> Result<Vec<T>, EstimationError> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let s = line.trim();
        if s.is_empty() || s.starts_with('#') {
            continue;
        }
        let v: f64 = s.parse().map_err(|e: std::num::ParseFloatError| EstimationError::Parse {
            line: i + 1,
            reason: e.to_string(),
        })?;
        out.push(T::lit(v));
    }
    Ok(out)
}
