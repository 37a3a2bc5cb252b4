//! Tail integrals of the survival function, normalised by `F̄(x)`.
//!
//! Every integrand is a ratio `exp(ln F̄(u) − ln F̄(x)) ≤ 1`, so nothing
//! underflows however deep in the tail `x` lies.

use crate::dist_catalog::DistributionSpec;
use crate::error::EvalError;
use crate::scalar::Scalar;

use super::quadrature::{integrate, integrate_semi_infinite, QuadError, QuadOptions};

/// Nesting depth of the tail integral: weights `1`, `t`, `t²/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailMode {
    Single,
    Double,
    Triple,
}

impl TailMode {
    fn weight<T: Scalar>(self, t: T) -> T {
        match self {
            TailMode::Single => T::one(),
            TailMode::Double => t,
            TailMode::Triple => T::lit(0.5) * t * t,
        }
    }
}

fn lift<T: Scalar>(x: T, e: QuadError) -> EvalError {
    match e {
        QuadError::NotConverged { estimate, error } => EvalError::Quadrature { x: x.as_f64(), partial: estimate, error },
        QuadError::Integrand(e) => e,
    }
}

fn base_log_survival<T: Scalar>(spec: &DistributionSpec<T>, x: T) -> Result<T, EvalError> {
    let l0 = spec.log_survival(x);
    if l0 == T::neg_infinity() || !l0.is_finite() {
        return Err(EvalError::OutsideDomain { x: x.as_f64(), reason: "survival function vanishes".into() });
    }
    Ok(l0)
}

/// Length scale `h` with `logr(h) ≈ −1` for a non-increasing `logr`, `logr(0) = 0`.
fn decay_scale<T: Scalar, L: Fn(T) -> T>(logr: L, x: T) -> Result<T, EvalError> {
    let target = -T::one();
    let two = T::lit(2.0);
    let mut h = T::one();
    for _ in 0..1100 {
        if logr(h) < target {
            h = h / two;
        } else {
            break;
        }
    }
    for _ in 0..1100 {
        if logr(h) > target {
            h = h * two;
        } else {
            break;
        }
    }
    if !(h.is_finite() && h > T::zero()) || logr(h) > target {
        return Err(EvalError::OutsideDomain { x: x.as_f64(), reason: "survival ratio does not decay".into() });
    }
    Ok(h)
}

impl TailMode {
    fn order(self) -> i32 {
        match self {
            TailMode::Single => 1,
            TailMode::Double => 2,
            TailMode::Triple => 3,
        }
    }
}

/// `∫_x^{x_E} F̄(u) w(u−x) du / F̄(x)` for the weights of `mode`.
pub fn tail_ratio_integral<T: Scalar>(
    spec: &DistributionSpec<T>,
    x: T,
    mode: TailMode,
    opts: QuadOptions<T>,
) -> Result<T, EvalError> {
    let (h, m) = scaled_tail_ratio_integral(spec, x, mode, opts)?;
    Ok(h.powi(mode.order()) * m)
}

/// The same integral in units of a length scale `h`: returns `(h, m)` with
/// value `h^k·m`, `k = 1, 2, 3` for single, double, triple. Products of the
/// scaled values do not overflow where the raw ones would.
pub fn scaled_tail_ratio_integral<T: Scalar>(
    spec: &DistributionSpec<T>,
    x: T,
    mode: TailMode,
    opts: QuadOptions<T>,
) -> Result<(T, T), EvalError> {
    base_log_survival(spec, x)?;
    let x_e = spec.x_e();
    if x_e.is_finite() {
        let h = x_e - x;
        let l0 = spec.log_survival_below_endpoint(h);
        let integrand = |tau: T| Ok((spec.log_survival_below_endpoint(h * (T::one() - tau)) - l0).exp() * mode.weight(tau));
        integrate(integrand, T::zero(), T::one(), opts).map(|r| (h, r.value)).map_err(|e| lift(x, e))
    } else {
        let logr = |t: T| spec.log_survival_increment(x, t);
        let h = decay_scale(logr, x)?;
        let integrand = |tau: T| Ok(logr(h * tau).exp() * mode.weight(tau));
        integrate_semi_infinite(integrand, T::zero(), T::one(), opts)
            .map(|r| (h, r.value))
            .map_err(|e| lift(x, e))
    }
}

/// `∫_x^∞ F̄(u)/u du / F̄(x)`, integrated in `s = ln(u/x)`.
pub fn frechet_tail_integral<T: Scalar>(spec: &DistributionSpec<T>, x: T, opts: QuadOptions<T>) -> Result<T, EvalError> {
    if !(x > T::zero()) {
        return Err(EvalError::OutsideDomain { x: x.as_f64(), reason: "needs x > 0".into() });
    }
    let l0 = base_log_survival(spec, x)?;
    let logr = |s: T| spec.log_survival(x * s.exp()) - l0;
    let h = decay_scale(logr, x)?;
    integrate_semi_infinite(|s: T| Ok(logr(s).exp()), T::zero(), h, opts)
        .map(|r| r.value)
        .map_err(|e| lift(x, e))
}

/// `∫_x^{x_E} F̄(u)/(x_E−u) du / F̄(x)`, integrated in `s = ln((x_E−x)/(x_E−u))`.
pub fn weibull_tail_integral<T: Scalar>(spec: &DistributionSpec<T>, x: T, opts: QuadOptions<T>) -> Result<T, EvalError> {
    let x_e = spec.x_e();
    if !x_e.is_finite() || !(x < x_e) {
        return Err(EvalError::OutsideDomain { x: x.as_f64(), reason: "needs a finite endpoint above x".into() });
    }
    let d = x_e - x;
    base_log_survival(spec, x)?;
    let l0 = spec.log_survival_below_endpoint(d);
    let logr = |s: T| spec.log_survival_below_endpoint(d * (-s).exp()) - l0;
    let h = decay_scale(logr, x)?;
    integrate_semi_infinite(|s: T| Ok(logr(s).exp()), T::zero(), h, opts)
        .map(|r| r.value)
        .map_err(|e| lift(x, e))
}
