use std::fmt;

use crate::scalar::Scalar;

/// Length of the trailing window inspected by [`estimate_limit`].
pub const DEFAULT_WINDOW: usize = 4;

/// Outcome of a limit extrapolation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Verdict<T> {
    Converged(T),
    DivergedToInfinity,
    DivergedToZero,
    Oscillatory,
    Inconclusive,
}

impl<T: Scalar> Verdict<T> {
    pub fn converged(&self) -> Option<T> {
        match *self {
            Verdict::Converged(v) => Some(v),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Converged(_) => "converged",
            Verdict::DivergedToInfinity => "diverged_to_infinity",
            Verdict::DivergedToZero => "diverged_to_zero",
            Verdict::Oscillatory => "oscillatory",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

impl<T: Scalar> fmt::Display for Verdict<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Converged(v) => write!(f, "converged({v})"),
            other => f.write_str(other.name()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitOptions<T> {
    /// Relative tolerance on the trailing-window spread.
    pub tol: T,
    pub window: usize,
    /// A decay towards zero is a failure for the caller (the limit must be
    /// positive), so it is reported as `DivergedToZero` before testing for
    /// convergence.
    pub require_positive: bool,
}

impl<T: Scalar> LimitOptions<T> {
    pub fn new(tol: T) -> Self {
        LimitOptions { tol, window: DEFAULT_WINDOW, require_positive: false }
    }

    pub fn positive(mut self) -> Self {
        self.require_positive = true;
        self
    }
}

/// A trail of values along a probe grid with its verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitEstimate<T> {
    pub values: Vec<T>,
    pub limit: Option<T>,
    pub verdict: Verdict<T>,
    pub window_spread: T,
    pub tol: T,
}

/// Classifies the behaviour of `values` at the end of the grid.
///
/// In order: a non-finite tail is inconclusive (NaN) or divergent (±∞); with
/// `require_positive`, a strictly shrinking tail below `tol` is
/// `DivergedToZero`; a trailing window with spread `≤ tol·max(1, |mean|)` is
/// `Converged(mean)`; monotone increments that do not shrink (or a magnitude
/// beyond `1/tol`) mean divergence; alternating non-shrinking increments are
/// `Oscillatory`; anything else is `Inconclusive`.
pub fn estimate_limit<T: Scalar>(values: &[T], opts: LimitOptions<T>) -> LimitEstimate<T> {
    let w = opts.window.max(2);
    let tol = opts.tol;
    let make = |verdict: Verdict<T>, spread: T| LimitEstimate {
        values: values.to_vec(),
        limit: verdict.converged(),
        verdict,
        window_spread: spread,
        tol,
    };
    if values.len() < w {
        return make(Verdict::Inconclusive, T::nan());
    }
    let tail = &values[values.len() - w..];
    if tail.iter().any(|v| v.is_nan()) {
        return make(Verdict::Inconclusive, T::nan());
    }
    if tail.iter().any(|v| v.is_infinite()) {
        let last = tail[w - 1];
        let v = if last.is_infinite() { Verdict::DivergedToInfinity } else { Verdict::Inconclusive };
        return make(v, T::infinity());
    }
    let (lo, hi) = tail.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let spread = hi - lo;
    let mean = tail.iter().copied().sum::<T>() / T::lit(w as f64);

    let decaying = decays_to_zero(tail, tol);
    if opts.require_positive && decaying {
        return make(Verdict::DivergedToZero, spread);
    }
    if spread <= tol * T::one().max(mean.abs()) {
        return make(Verdict::Converged(mean), spread);
    }
    if values.len() > w {
        let seg = &values[values.len() - w - 1..];
        let incs: Vec<T> = seg.windows(2).map(|p| p[1] - p[0]).collect();
        let first = incs[0].abs();
        let last = incs[incs.len() - 1].abs();
        let not_shrinking = last >= T::lit(0.5) * first;
        let monotone = incs.iter().all(|&d| d > T::zero()) || incs.iter().all(|&d| d < T::zero());
        if monotone {
            let growing = tail[w - 1].abs() > tail[0].abs();
            if (growing && tail[w - 1].abs() > T::one() / tol) || not_shrinking {
                return make(Verdict::DivergedToInfinity, spread);
            }
            if decaying {
                return make(Verdict::DivergedToZero, spread);
            }
        } else {
            let alternating = incs.windows(2).all(|p| p[0] * p[1] < T::zero());
            if alternating && not_shrinking {
                return make(Verdict::Oscillatory, spread);
            }
        }
    }
    make(Verdict::Inconclusive, spread)
}

fn decays_to_zero<T: Scalar>(tail: &[T], tol: T) -> bool {
    let first = tail[0];
    let last = tail[tail.len() - 1];
    let same_sign = tail.iter().all(|&v| v > T::zero()) || tail.iter().all(|&v| v < T::zero());
    let strictly_shrinking = tail.windows(2).all(|p| p[1].abs() < p[0].abs());
    same_sign && strictly_shrinking && last.abs() < tol && last.abs() <= T::lit(0.5) * first.abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn geometric(count: usize) -> Vec<f64> {
        (0..count).map(|k| 2.0 * 1.5f64.powi(k as i32)).collect()
    }

    #[test]
    fn null_sequence_converges_to_zero() {
        let v: Vec<f64> = geometric(24).iter().map(|x| 1.0 / x).collect();
        let e = estimate_limit(&v, LimitOptions::new(1e-3));
        let l = e.verdict.converged().expect("converged");
        assert!(l.abs() < 1e-3);
        assert!(e.window_spread <= 1e-3);
    }

    #[test]
    fn null_sequence_with_positivity_required() {
        let v: Vec<f64> = geometric(16).iter().map(|x| 1.0 / x).collect();
        let e = estimate_limit(&v, LimitOptions::new(1e-2).positive());
        assert_eq!(e.verdict, Verdict::DivergedToZero);
    }

    #[test]
    fn logarithm_diverges() {
        let v: Vec<f64> = geometric(16).iter().map(|x| x.ln()).collect();
        assert_eq!(estimate_limit(&v, LimitOptions::new(1e-2)).verdict, Verdict::DivergedToInfinity);
        let neg: Vec<f64> = v.iter().map(|x| -x).collect();
        assert_eq!(estimate_limit(&neg, LimitOptions::new(1e-2)).verdict, Verdict::DivergedToInfinity);
    }

    #[test]
    fn alternating_geometric_decay_converges() {
        let v: Vec<f64> = (1..=24).map(|k| 1.0 + (-0.5f64).powi(k)).collect();
        let e = estimate_limit(&v, LimitOptions::new(1e-6));
        assert!((e.verdict.converged().unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn oscillation_and_short_input() {
        let v: Vec<f64> = (0..16).map(|k| if k % 2 == 0 { 1.0 } else { -1.0 }).collect();
        assert_eq!(estimate_limit(&v, LimitOptions::new(1e-2)).verdict, Verdict::Oscillatory);
        assert_eq!(estimate_limit(&[1.0, 2.0], LimitOptions::new(1e-2)).verdict, Verdict::Inconclusive);
        let v = vec![1.0, 2.0, 3.0, 4.0, 5.0, f64::NAN, 1.0, 1.0];
        assert_eq!(estimate_limit(&v, LimitOptions::new(1e-2)).verdict, Verdict::Inconclusive);
        let v = vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, f64::INFINITY];
        assert_eq!(estimate_limit(&v, LimitOptions::new(1e-2)).verdict, Verdict::DivergedToInfinity);
    }

    #[test]
    fn slow_monotone_growth_is_detected() {
        // ln ln x on a geometric grid: increments shrink too slowly to converge
        let v: Vec<f64> = geometric(16).iter().map(|x| x.ln().ln()).collect();
        assert_eq!(estimate_limit(&v, LimitOptions::new(1e-2)).verdict, Verdict::DivergedToInfinity);
    }

    proptest! {
        #[test]
        fn converged_limits_scale(limit in prop_oneof![1.0f64..100.0, -100.0f64..-1.0], amp in -1.0f64..1.0, q in 0.1f64..0.6, k in 1.0f64..50.0) {
            let v: Vec<f64> = (0..30).map(|i| limit + amp * q.powi(i)).collect();
            let e = estimate_limit(&v, LimitOptions::new(1e-6));
            let scaled: Vec<f64> = v.iter().map(|x| k * x).collect();
            let es = estimate_limit(&scaled, LimitOptions::new(1e-6));
            if let Verdict::Converged(l) = e.verdict {
                let ls = es.verdict.converged().expect("scaled sequence converges");
                prop_assert!((ls - k * l).abs() <= 1e-12 * (k * l).abs());
                prop_assert!(e.window_spread <= 1e-6 * l.abs().max(1.0));
            }
        }
    }
}
