//! Direct probes of the two representations: the VR ratio against the
//! generalised Pareto tail, its single-threshold (POT) reading, and the
//! reconstruction of the factor `c(x)` of the von Mises form
//! `F̄(x) = c(x)·exp(−∫_{x*}^x 1/ψ)`.

use thiserror::Error;

use crate::dist_catalog::DistributionSpec;
use crate::error::EvalError;
use crate::numerics::{
    cumulative_integral, estimate_limit, GridError, LimitEstimate, LimitOptions, PanelError, ProbeGrid, QuadOptions,
    Verdict,
};
use crate::scalar::Scalar;
use crate::universal_aux::AuxiliaryFunction;
use crate::validity::{Check, DEFAULT_TOL};

/// `|γ|` below this is treated as zero by [`gpd_tail`].
pub const GAMMA_ZERO_CUTOFF: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProbeError {
    #[error("1 + gamma*z must be positive (gamma = {gamma}, z = {z})")]
    GpdDomain { gamma: f64, z: f64 },
    #[error("z must be positive, got {0}")]
    NonPositiveZ(f64),
    #[error("x + z*psi(x) = {shifted} leaves the support (x = {x}, x_e = {x_e})")]
    ExitsSupport { x: f64, shifted: f64, x_e: f64 },
    #[error("psi({x}) = {value} is not positive")]
    NonPositivePsi { x: f64, value: f64 },
    #[error("survival function vanishes at {0}")]
    ZeroSurvival(f64),
    #[error("probe grid: {0}")]
    Grid(#[from] GridError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Quadrature(#[from] PanelError),
}

/// Standard generalised Pareto tail `(1+γz)^{−1/γ}`, `e^{−z}` at γ = 0.
pub fn gpd_tail<T: Scalar>(gamma: T, z: T) -> Result<T, ProbeError> {
    if gamma.abs() < T::lit(GAMMA_ZERO_CUTOFF) {
        return Ok((-z).exp());
    }
    let base = T::one() + gamma * z;
    if !(base > T::zero()) {
        return Err(ProbeError::GpdDomain { gamma: gamma.as_f64(), z: z.as_f64() });
    }
    Ok((-(gamma * z).ln_1p() / gamma).exp())
}

/// `ln(F̄(x + zψ(x)) / F̄(x))`, or `None` when `x + zψ(x)` is at or past x_E.
fn log_ratio<T: Scalar>(
    spec: &DistributionSpec<T>,
    psi: &AuxiliaryFunction<T>,
    x: T,
    z: T,
) -> Result<Option<T>, ProbeError> {
    let p = psi.eval(x)?;
    if !(p > T::zero()) {
        return Err(ProbeError::NonPositivePsi { x: x.as_f64(), value: p.as_f64() });
    }
    let shifted = x + z * p;
    if shifted >= spec.x_e() {
        return Ok(None);
    }
    let l0 = spec.log_survival(x);
    if l0 == T::neg_infinity() {
        return Err(ProbeError::ZeroSurvival(x.as_f64()));
    }
    Ok(Some(spec.log_survival(shifted) - l0))
}

/// The VR ratio trail at one `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct VrProbeResult<T> {
    pub z: T,
    pub target: T,
    /// Grid points actually used (those keeping `x + zψ(x)` inside the support).
    pub points: Vec<T>,
    pub estimate: LimitEstimate<T>,
    /// Pass when the trail converges to `target` within the tolerance.
    pub verdict: Check,
}

impl<T: Scalar> VrProbeResult<T> {
    pub fn ratios(&self) -> &[T] {
        &self.estimate.values
    }
}

/// `F̄(x + zψ(x)) / F̄(x)` along the grid, compared with `gpd_tail(γ, z)`
/// at the default tolerance.
pub fn vr_limit_probe<T: Scalar>(
    spec: &DistributionSpec<T>,
    psi: &AuxiliaryFunction<T>,
    z: T,
    grid: &ProbeGrid<T>,
) -> Result<VrProbeResult<T>, ProbeError> {
    vr_limit_probe_with_tol(spec, psi, z, grid, T::lit(DEFAULT_TOL))
}

pub fn vr_limit_probe_with_tol<T: Scalar>(
    spec: &DistributionSpec<T>,
    psi: &AuxiliaryFunction<T>,
    z: T,
    grid: &ProbeGrid<T>,
    tol: T,
) -> Result<VrProbeResult<T>, ProbeError> {
    let target = gpd_tail(spec.gamma(), z)?;
    let grid = grid.after(psi.x_star())?;
    let mut points = Vec::with_capacity(grid.len());
    let mut ratios = Vec::with_capacity(grid.len());
    for &x in grid.points() {
        if let Some(lr) = log_ratio(spec, psi, x, z)? {
            points.push(x);
            ratios.push(lr.exp());
        }
    }
    // the retained points must still form a usable grid
    ProbeGrid::from_points(points.clone(), grid.x_e())?;
    let estimate = estimate_limit(&ratios, LimitOptions::new(tol));
    let verdict = match estimate.verdict {
        Verdict::Converged(l) if (l - target).abs() <= tol * T::one().max(target.abs()) => Check::Pass,
        Verdict::Converged(_) | Verdict::DivergedToInfinity | Verdict::DivergedToZero => Check::Fail,
        Verdict::Oscillatory | Verdict::Inconclusive => Check::Inconclusive,
    };
    Ok(VrProbeResult { z, target, points, estimate, verdict })
}

/// `P((X − x)/ψ(x) > z | X > x)`: the VR ratio at the single threshold `x`,
/// the finite-threshold approximation of `gpd_tail(γ, z)`.
pub fn pot_excess_probability<T: Scalar>(
    spec: &DistributionSpec<T>,
    psi: &AuxiliaryFunction<T>,
    x: T,
    z: T,
) -> Result<T, ProbeError> {
    if !(z > T::zero()) {
        return Err(ProbeError::NonPositiveZ(z.as_f64()));
    }
    match log_ratio(spec, psi, x, z)? {
        Some(lr) => Ok(lr.exp()),
        None => {
            let shifted = x + z * psi.eval(x)?;
            Err(ProbeError::ExitsSupport { x: x.as_f64(), shifted: shifted.as_f64(), x_e: spec.x_e().as_f64() })
        }
    }
}

/// Behaviour of `c(x)` along the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CVerdict<T> {
    /// `c(x) → c > 0`.
    Converged(T),
    DivergedToZero,
    DivergedToInfinity,
    Oscillatory,
    Inconclusive,
}

impl<T: Scalar> CVerdict<T> {
    pub fn name(&self) -> &'static str {
        match self {
            CVerdict::Converged(_) => "converged",
            CVerdict::DivergedToZero => "diverged_to_zero",
            CVerdict::DivergedToInfinity => "diverged_to_infinity",
            CVerdict::Oscillatory => "oscillatory",
            CVerdict::Inconclusive => "inconclusive",
        }
    }

    /// True iff the route accepts ψ as vMR-valid.
    pub fn is_valid(&self) -> bool {
        matches!(self, CVerdict::Converged(_))
    }
}

/// `c(x_k)` trail, kept in log space.
#[derive(Debug, Clone, PartialEq)]
pub struct CReconstruction<T> {
    pub x_star: T,
    pub points: Vec<T>,
    /// `ln c(x_k) = ln F̄(x_k) + ∫_{x*}^{x_k} 1/ψ`.
    pub log_c: Vec<T>,
    /// Limit estimate on the `ln c` trail.
    pub log_estimate: LimitEstimate<T>,
    pub verdict: CVerdict<T>,
}

impl<T: Scalar> CReconstruction<T> {
    /// `c(x_k)`; underflows to zero or overflows to infinity far out on divergent trails.
    pub fn c_values(&self) -> Vec<T> {
        self.log_c.iter().map(|v| v.exp()).collect()
    }
}

/// Reconstructs `c(x) = F̄(x)·exp(∫_{x*}^x 1/ψ)` at the grid points above `x_star`.
pub fn reconstruct_c<T: Scalar>(
    spec: &DistributionSpec<T>,
    psi: &AuxiliaryFunction<T>,
    x_star: T,
    grid: &ProbeGrid<T>,
) -> Result<CReconstruction<T>, ProbeError> {
    reconstruct_c_with_tol(spec, psi, x_star, grid, T::lit(DEFAULT_TOL))
}

pub fn reconstruct_c_with_tol<T: Scalar>(
    spec: &DistributionSpec<T>,
    psi: &AuxiliaryFunction<T>,
    x_star: T,
    grid: &ProbeGrid<T>,
    tol: T,
) -> Result<CReconstruction<T>, ProbeError> {
    let grid = grid.after(x_star)?;
    let inv = |v: T| {
        let p = psi.eval(v)?;
        if p > T::zero() {
            Ok(T::one() / p)
        } else {
            Err(EvalError::OutsideDomain { x: v.as_f64(), reason: "psi is not positive".into() })
        }
    };
    let integral = cumulative_integral(&inv, x_star, grid.points(), grid.x_e(), QuadOptions::default())?;
    let log_c: Vec<T> = grid.points().iter().zip(&integral).map(|(&x, &i)| spec.log_survival(x) + i).collect();
    let log_estimate = estimate_limit(&log_c, LimitOptions::new(tol));
    let last = log_c.last().copied().unwrap_or(T::zero());
    let verdict = match log_estimate.verdict {
        Verdict::Converged(l) => CVerdict::Converged(l.exp()),
        Verdict::DivergedToInfinity if last < T::zero() => CVerdict::DivergedToZero,
        Verdict::DivergedToInfinity => CVerdict::DivergedToInfinity,
        // ln c shrinking to 0 means c → 1
        Verdict::DivergedToZero => CVerdict::Converged(T::one()),
        Verdict::Oscillatory => CVerdict::Oscillatory,
        Verdict::Inconclusive => CVerdict::Inconclusive,
    };
    Ok(CReconstruction { x_star, points: grid.points().to_vec(), log_c, log_estimate, verdict })
}
