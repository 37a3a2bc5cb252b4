//! Numerical building blocks: probe grids, limit detection, adaptive
//! quadrature (including log-space tail integrals) and differentiation.

mod diff;
mod grid;
mod limit;
mod quadrature;
mod tail;

pub use diff::numeric_derivative;
pub use grid::{GridError, GridRule, ProbeGrid, MIN_GRID_POINTS};
pub use limit::{estimate_limit, LimitEstimate, LimitOptions, Verdict, DEFAULT_WINDOW};
pub use quadrature::{cumulative_integral, integrate, integrate_semi_infinite, PanelError, QuadError, QuadOptions, QuadResult};
pub use tail::{frechet_tail_integral, scaled_tail_ratio_integral, tail_ratio_integral, weibull_tail_integral, TailMode};

use crate::scalar::Scalar;

/// Solves `f(x) = target` for a non-increasing `f` bracketed by
/// `f(lo) ≥ target ≥ f(hi)`.
pub fn bisect_decreasing<T: Scalar, F: Fn(T) -> T>(f: F, mut lo: T, mut hi: T, target: T) -> T {
    let half = T::lit(0.5);
    for _ in 0..400 {
        let mid = lo + (hi - lo) * half;
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) >= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo + (hi - lo) * half
}
