//! Decision procedures for auxiliary functions: Property P_γ, VR-validity
//! (asymptotic equivalence with ψ_u), vMR-validity (finiteness of
//! `K_z = ∫_z^{x_E} (1/ψ − 1/ψ_u)`), the γ-ratio law and the von Mises
//! condition.
//!
//! Verdicts are three-valued. A finite grid can only accumulate evidence for
//! an asymptotic statement, so every verdict carries the trail it was read from.

pub mod corpus;

use std::fmt;

use thiserror::Error;

use crate::dist_catalog::DistributionSpec;
use crate::error::{CatalogError, EvalError};
use crate::numerics::{
    cumulative_integral, estimate_limit, numeric_derivative, GridError, LimitEstimate, LimitOptions, PanelError,
    ProbeGrid, QuadOptions, Verdict,
};
use crate::scalar::Scalar;
use crate::universal_aux::AuxiliaryFunction;

/// Default relative tolerance for asymptotic-equivalence verdicts.
pub const DEFAULT_TOL: f64 = 1e-2;

/// Quadrature tolerances per panel of the K integral. The verdicts need far
/// less, and ψ obtained by quadrature carries its own rounding noise.
pub const K_REL_TOL: f64 = 1e-5;
pub const K_ABS_TOL: f64 = 1e-12;

/// Pass/fail verdict of a property check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Check {
    Pass,
    Fail,
    Inconclusive,
}

/// Membership verdict for A_V or A_M.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Validity {
    Valid,
    Invalid,
    Inconclusive,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Check::Pass => "pass",
            Check::Fail => "fail",
            Check::Inconclusive => "inconclusive",
        })
    }
}

impl fmt::Display for Validity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Validity::Valid => "valid",
            Validity::Invalid => "invalid",
            Validity::Inconclusive => "inconclusive",
        })
    }
}

/// Values of some quantity along a grid, with the limit verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct Trail<T> {
    pub points: Vec<T>,
    pub estimate: LimitEstimate<T>,
    /// First point-wise failure, if any (the verdict is then inconclusive).
    pub failure: Option<EvalError>,
}

impl<T: Scalar> Trail<T> {
    pub fn values(&self) -> &[T] {
        &self.estimate.values
    }
}

fn sample<T: Scalar, F: Fn(T) -> Result<T, EvalError>>(points: &[T], f: F) -> (Vec<T>, Option<EvalError>) {
    let mut failure = None;
    let values = points
        .iter()
        .map(|&x| match f(x) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                T::nan()
            }
        })
        .collect();
    (values, failure)
}

fn trail<T: Scalar, F: Fn(T) -> Result<T, EvalError>>(points: &[T], f: F, opts: LimitOptions<T>) -> Trail<T> {
    let (values, failure) = sample(points, f);
    let mut estimate = estimate_limit(&values, opts);
    if failure.is_some() {
        estimate.verdict = Verdict::Inconclusive;
        estimate.limit = None;
    }
    Trail { points: points.to_vec(), estimate, failure }
}

/// Result of the P_γ check.
#[derive(Debug, Clone, PartialEq)]
pub struct PGammaCheck<T> {
    pub verdict: Check,
    pub gamma: T,
    pub target: T,
    /// The quantity whose limit is taken: `psi'(x)`, `psi(x)/x` or `psi(x)/(x_e-x)`.
    pub quantity: &'static str,
    pub trail: Trail<T>,
}

/// Property P_γ: `ψ′ → 0` (γ = 0), `ψ(x)/x → γ` (γ > 0) or
/// `ψ(x)/(x_E − x) → −γ` (γ < 0). A zero target is met within `tol/10`
/// absolute, other targets within `tol` relative.
pub fn check_property_p_gamma<T: Scalar>(
    psi: &AuxiliaryFunction<T>,
    gamma: T,
    grid: &ProbeGrid<T>,
    tol: T,
) -> PGammaCheck<T> {
    let x_e = grid.x_e();
    let opts = LimitOptions::new(tol);
    let (quantity, target, trail) = if gamma == T::zero() {
        let t = trail(grid.points(), |x| numeric_derivative(|u| psi.eval(u), x), opts.positive());
        ("psi'(x)", T::zero(), t)
    } else if gamma > T::zero() {
        ("psi(x)/x", gamma, trail(grid.points(), |x| Ok(psi.eval(x)? / x), opts))
    } else {
        ("psi(x)/(x_e-x)", -gamma, trail(grid.points(), |x| Ok(psi.eval(x)? / (x_e - x)), opts))
    };
    let verdict = match trail.estimate.verdict {
        Verdict::Converged(l) => {
            let ok = if target == T::zero() {
                l.abs() <= tol / T::lit(10.0)
            } else {
                (l - target).abs() <= tol * target.abs()
            };
            if ok {
                Check::Pass
            } else {
                Check::Fail
            }
        }
        Verdict::DivergedToZero if target == T::zero() => Check::Pass,
        Verdict::DivergedToZero | Verdict::DivergedToInfinity => Check::Fail,
        Verdict::Oscillatory | Verdict::Inconclusive => Check::Inconclusive,
    };
    PGammaCheck { verdict, gamma, target, quantity, trail }
}

/// Result of the VR check (ratio `ψ/ψ_u`).
#[derive(Debug, Clone, PartialEq)]
pub struct VrCheck<T> {
    pub verdict: Validity,
    pub trail: Trail<T>,
}

/// VR-validity: `ψ(x)/ψ_u(x) → 1`.
pub fn check_vr_validity<T: Scalar>(
    psi: &AuxiliaryFunction<T>,
    psi_u: &AuxiliaryFunction<T>,
    grid: &ProbeGrid<T>,
    tol: T,
) -> VrCheck<T> {
    let trail = trail(grid.points(), |x| Ok(psi.eval(x)? / psi_u.eval(x)?), LimitOptions::new(tol));
    let verdict = match trail.estimate.verdict {
        Verdict::Converged(l) if (l - T::one()).abs() <= tol => Validity::Valid,
        Verdict::Converged(_) | Verdict::DivergedToInfinity | Verdict::DivergedToZero => Validity::Invalid,
        Verdict::Oscillatory | Verdict::Inconclusive => Validity::Inconclusive,
    };
    VrCheck { verdict, trail }
}

/// Why a vMR verdict is not `valid`.
#[derive(Debug, Clone, PartialEq)]
pub enum VmrReason {
    /// ψ is not in P_γ (or P_γ could not be decided).
    PGamma(Check),
    /// The running K integral diverges.
    KDiverges,
    /// The K trail neither settles nor diverges.
    KUndecided,
    /// The integrand failed on a panel `[a, b]`.
    Singularity { a: f64, b: f64, detail: String },
}

impl fmt::Display for VmrReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VmrReason::PGamma(c) => write!(f, "p_gamma {c}"),
            VmrReason::KDiverges => write!(f, "K diverges"),
            VmrReason::KUndecided => write!(f, "K trail undecided"),
            VmrReason::Singularity { a, b, detail } => write!(f, "integrand failure on [{a}, {b}]: {detail}"),
        }
    }
}

/// Result of the vMR check.
#[derive(Debug, Clone, PartialEq)]
pub struct VmrCheck<T> {
    pub verdict: Validity,
    pub reason: Option<VmrReason>,
    pub z: T,
    /// `K(x_k) = ∫_z^{x_k} (1/ψ − 1/ψ_u)`; `None` when P_γ failed first.
    pub k_trail: Option<Trail<T>>,
    pub k_z: Option<T>,
}

/// The running integral `K(x_k) = ∫_z^{x_k} (1/ψ − 1/ψ_u) dv` at the grid points above `z`.
pub fn k_trail<T: Scalar>(
    psi: &AuxiliaryFunction<T>,
    psi_u: &AuxiliaryFunction<T>,
    z: T,
    grid: &ProbeGrid<T>,
) -> Result<(Vec<T>, Vec<T>), PanelError> {
    let points: Vec<T> = grid.points().iter().copied().filter(|&p| p > z).collect();
    let integrand = |v: T| {
        let a = psi.eval(v)?;
        let b = psi_u.eval(v)?;
        if a == T::zero() || b == T::zero() {
            return Err(EvalError::DivisionByZero { x: v.as_f64() });
        }
        Ok(T::one() / a - T::one() / b)
    };
    // the integrand is a difference, so exact cancellation leaves only rounding noise;
    // an absolute floor lets such panels terminate
    let opts = QuadOptions { rel_tol: T::lit(K_REL_TOL), abs_tol: T::lit(K_ABS_TOL), ..QuadOptions::default() };
    let k = cumulative_integral(&integrand, z, &points, grid.x_e(), opts)?;
    Ok((points, k))
}

/// vMR-validity given an already computed P_γ verdict.
pub fn check_vmr_given_p_gamma<T: Scalar>(
    psi: &AuxiliaryFunction<T>,
    psi_u: &AuxiliaryFunction<T>,
    p_gamma: Check,
    z: T,
    grid: &ProbeGrid<T>,
    tol: T,
) -> VmrCheck<T> {
    match p_gamma {
        Check::Pass => {}
        Check::Fail => {
            return VmrCheck {
                verdict: Validity::Invalid,
                reason: Some(VmrReason::PGamma(p_gamma)),
                z,
                k_trail: None,
                k_z: None,
            }
        }
        Check::Inconclusive => {
            return VmrCheck {
                verdict: Validity::Inconclusive,
                reason: Some(VmrReason::PGamma(p_gamma)),
                z,
                k_trail: None,
                k_z: None,
            }
        }
    }
    let (points, k) = match k_trail(psi, psi_u, z, grid) {
        Ok(v) => v,
        Err(e) => {
            return VmrCheck {
                verdict: Validity::Inconclusive,
                reason: Some(VmrReason::Singularity { a: e.a, b: e.b, detail: e.source.to_string() }),
                z,
                k_trail: None,
                k_z: None,
            }
        }
    };
    let estimate = estimate_limit(&k, LimitOptions::new(tol));
    let (verdict, reason, k_z) = match estimate.verdict {
        Verdict::Converged(l) => (Validity::Valid, None, Some(l)),
        Verdict::DivergedToZero => (Validity::Valid, None, Some(T::zero())),
        Verdict::DivergedToInfinity => (Validity::Invalid, Some(VmrReason::KDiverges), None),
        Verdict::Oscillatory | Verdict::Inconclusive => (Validity::Inconclusive, Some(VmrReason::KUndecided), None),
    };
    VmrCheck { verdict, reason, z, k_trail: Some(Trail { points, estimate, failure: None }), k_z }
}

/// vMR-validity: P_γ holds and `K(x)` converges to a finite `K_z`.
pub fn check_vmr_validity<T: Scalar>(
    psi: &AuxiliaryFunction<T>,
    psi_u: &AuxiliaryFunction<T>,
    gamma: T,
    z: T,
    grid: &ProbeGrid<T>,
    tol: T,
) -> VmrCheck<T> {
    let p = check_property_p_gamma(psi, gamma, grid, tol);
    check_vmr_given_p_gamma(psi, psi_u, p.verdict, z, grid, tol)
}

/// Overall classification of a (distribution, ψ) pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    VmrValid,
    VrOnly,
    Invalid,
    Inconclusive,
}

impl Classification {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(self) -> i32 {
        match self {
            Classification::VmrValid => 0,
            Classification::VrOnly => 3,
            Classification::Invalid => 4,
            Classification::Inconclusive => 5,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Classification::VmrValid => "vmr_valid",
            Classification::VrOnly => "vr_only",
            Classification::Invalid => "invalid",
            Classification::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Combined P_γ / VR / vMR verdicts for one (distribution, ψ) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidityReport<T> {
    pub dist_id: String,
    pub psi_desc: String,
    pub psi_u_desc: String,
    pub grid: ProbeGrid<T>,
    pub tol: T,
    pub p_gamma: PGammaCheck<T>,
    pub vr: VrCheck<T>,
    pub vmr: VmrCheck<T>,
    pub k_z: Option<T>,
    /// Set when vMR is valid but VR is not; such reports are never returned.
    pub consistency_flag: bool,
}

impl<T: Scalar> ValidityReport<T> {
    pub fn classification(&self) -> Classification {
        match (self.vr.verdict, self.vmr.verdict) {
            (_, Validity::Valid) => Classification::VmrValid,
            (Validity::Valid, Validity::Invalid) => Classification::VrOnly,
            (Validity::Invalid, _) => Classification::Invalid,
            _ => Classification::Inconclusive,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ValidityError {
    #[error("probe grid: {0}")]
    Grid(#[from] GridError),
    #[error("z = {z} must exceed the domain start {x_star} of both functions")]
    BadZ { z: f64, x_star: f64 },
    #[error("inconsistent verdicts for {dist} / {psi}: vMR valid but VR {vr}")]
    ConsistencyViolation { dist: String, psi: String, vr: Validity },
}

/// Knobs for [`validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct ValidateOptions<T> {
    pub tol: T,
    /// Grid to use; the distribution's default grid otherwise.
    pub grid: Option<ProbeGrid<T>>,
    /// Lower limit of the K integral; the first usable grid point otherwise.
    pub z: Option<T>,
}

impl<T: Scalar> Default for ValidateOptions<T> {
    fn default() -> Self {
        ValidateOptions { tol: T::lit(DEFAULT_TOL), grid: None, z: None }
    }
}

/// Runs P_γ, VR and vMR for `psi` against `psi_u` on `spec`.
///
/// Fails with [`ValidityError::ConsistencyViolation`] rather than returning a
/// report that is vMR-valid without being VR-valid.
pub fn validate<T: Scalar>(
    spec: &DistributionSpec<T>,
    psi: &AuxiliaryFunction<T>,
    psi_u: &AuxiliaryFunction<T>,
    opts: &ValidateOptions<T>,
) -> Result<ValidityReport<T>, ValidityError> {
    let x_star = psi.x_star().max(psi_u.x_star());
    let base = opts.grid.clone().unwrap_or_else(|| spec.default_grid());
    let grid = base.after(x_star)?;
    let z = match opts.z {
        Some(z) if !(z > x_star) => return Err(ValidityError::BadZ { z: z.as_f64(), x_star: x_star.as_f64() }),
        Some(z) => z,
        None => grid.points()[0],
    };
    let tol = opts.tol;
    let p_gamma = check_property_p_gamma(psi, spec.gamma(), &grid, tol);
    let vr = check_vr_validity(psi, psi_u, &grid, tol);
    let vmr = check_vmr_given_p_gamma(psi, psi_u, p_gamma.verdict, z, &grid, tol);
    let consistency_flag = vmr.verdict == Validity::Valid && vr.verdict != Validity::Valid;
    if consistency_flag {
        return Err(ValidityError::ConsistencyViolation {
            dist: spec.to_string(),
            psi: psi.describe(),
            vr: vr.verdict,
        });
    }
    Ok(ValidityReport {
        dist_id: spec.to_string(),
        psi_desc: psi.describe(),
        psi_u_desc: psi_u.describe(),
        grid,
        tol,
        k_z: vmr.k_z,
        p_gamma,
        vr,
        vmr,
        consistency_flag,
    })
}

/// Extreme value index read off ψ.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaEstimate<T> {
    pub gamma: T,
    pub trail: Trail<T>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GammaError {
    #[error("the ratio trail oscillates")]
    Oscillatory,
    #[error("the ratio trail did not converge ({0})")]
    NotConverged(&'static str),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// `γ = lim ψ(x)/x` (infinite endpoint) or `lim ψ(x)/(x − x_E)` (finite endpoint).
pub fn estimate_gamma_from_psi<T: Scalar>(
    psi: &AuxiliaryFunction<T>,
    grid: &ProbeGrid<T>,
    tol: T,
) -> Result<GammaEstimate<T>, GammaError> {
    let x_e = grid.x_e();
    let t = if x_e.is_finite() {
        trail(grid.points(), |x| Ok(psi.eval(x)? / (x - x_e)), LimitOptions::new(tol))
    } else {
        trail(grid.points(), |x| Ok(psi.eval(x)? / x), LimitOptions::new(tol))
    };
    if let Some(e) = &t.failure {
        return Err(GammaError::Eval(e.clone()));
    }
    match t.estimate.verdict {
        Verdict::Converged(g) => Ok(GammaEstimate { gamma: g, trail: t }),
        Verdict::Oscillatory => Err(GammaError::Oscillatory),
        v => Err(GammaError::NotConverged(v.name())),
    }
}

/// Result of the von Mises condition check.
#[derive(Debug, Clone, PartialEq)]
pub struct VonMisesCheck<T> {
    pub verdict: Check,
    pub trail: Trail<T>,
}

/// `F̄·F″/F′² → −1`, evaluated as `(F̄/f)·(f′/f)`.
pub fn check_von_mises_condition<T: Scalar>(
    spec: &DistributionSpec<T>,
    grid: &ProbeGrid<T>,
    tol: T,
) -> Result<VonMisesCheck<T>, CatalogError> {
    if !spec.has_density() {
        return Err(CatalogError::NoDensity(spec.id().to_string()));
    }
    let t = trail(
        grid.points(),
        |x| {
            let ld = spec.log_density(x).unwrap_or(T::neg_infinity());
            let score = spec.density_score(x).ok_or(EvalError::OutsideDomain {
                x: x.as_f64(),
                reason: "outside the support".into(),
            })?;
            let v = (spec.log_survival(x) - ld).exp() * score;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(EvalError::NonFinite { x: x.as_f64() })
            }
        },
        LimitOptions::new(tol),
    );
    let verdict = match t.estimate.verdict {
        Verdict::Converged(l) if (l + T::one()).abs() <= tol => Check::Pass,
        Verdict::Converged(_) | Verdict::DivergedToInfinity | Verdict::DivergedToZero => Check::Fail,
        _ => Check::Inconclusive,
    };
    Ok(VonMisesCheck { verdict, trail: t })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist_catalog::CatalogEntry;
    use crate::numerics::GridRule;
    use crate::psi_expr::parse_psi;
    use approx::assert_relative_eq;
    use std::collections::BTreeMap;

    fn dist(s: &str) -> DistributionSpec<f64> {
        DistributionSpec::from_spec_str(s).unwrap()
    }

    fn user(src: &str, x_star: f64) -> AuxiliaryFunction<f64> {
        parse_psi(src).unwrap().to_auxiliary(&BTreeMap::new(), x_star).unwrap()
    }

    fn inf_grid() -> ProbeGrid<f64> {
        ProbeGrid::new(GridRule::Geometric { x0: 2.0, ratio: 1.5, count: 16 }, f64::INFINITY).unwrap()
    }

    #[test]
    fn p_gamma_examples() {
        assert_eq!(check_property_p_gamma(&user("1/x", 0.0), 0.0, &inf_grid(), 1e-2).verdict, Check::Pass);
        assert_eq!(check_property_p_gamma(&user("0.5*x", 0.0), 0.5, &inf_grid(), 1e-2).verdict, Check::Pass);
        assert_eq!(check_property_p_gamma(&user("1", 0.0), 1.0, &inf_grid(), 1e-2).verdict, Check::Fail);
        assert_eq!(check_property_p_gamma(&user("x", 0.0), 0.0, &inf_grid(), 1e-2).verdict, Check::Fail);
        let g = dist("beta:p=2,q=2").default_grid();
        assert_eq!(check_property_p_gamma(&user("(1-x)/2", 0.0), -0.5, &g, 1e-2).verdict, Check::Pass);
        let bad = check_property_p_gamma(&user("log(x-100)", 0.0), 0.0, &inf_grid(), 1e-2);
        assert_eq!(bad.verdict, Check::Inconclusive);
        assert!(bad.trail.failure.is_some());
    }

    #[test]
    fn vr_examples() {
        let g = inf_grid();
        let psi_u = user("x/(1+x^2)", 0.0);
        assert_eq!(check_vr_validity(&user("1/x", 0.0), &psi_u, &g, 1e-2).verdict, Validity::Valid);
        let twice = check_vr_validity(&user("2/x", 0.0), &psi_u, &g, 1e-2);
        assert_eq!(twice.verdict, Validity::Invalid);
        assert_relative_eq!(twice.trail.estimate.limit.unwrap(), 2.0, max_relative = 1e-3);
        let gamma_u = user("x/(x-1)", 1.0);
        assert_eq!(check_vr_validity(&user("1", 0.0), &gamma_u, &g.after(1.0).unwrap(), 1e-2).verdict, Validity::Valid);
    }

    #[test]
    fn vmr_gaussian_k_trail() {
        let g = dist("gaussian").default_grid();
        let psi = user("1/x", 0.0);
        let psi_u = user("x/(1+x^2)", 0.0);
        let (_, k) = k_trail(&psi, &psi_u, 2.0, &ProbeGrid::from_points(vec![2.5, 3.0, 4.0, 5.0, 8.0, 10.0, 15.0, 20.0], f64::INFINITY).unwrap()).unwrap();
        assert_relative_eq!(*k.last().unwrap(), -(10.0_f64).ln(), max_relative = 1e-10);
        let v = check_vmr_validity(&psi, &psi_u, 0.0, 2.0, &g, 1e-2);
        assert_eq!(v.verdict, Validity::Invalid);
        assert_eq!(v.reason, Some(VmrReason::KDiverges));
    }

    #[test]
    fn vmr_loggamma_and_identity() {
        let d = dist("loggamma:alpha=2,beta=3");
        let g = d.default_grid();
        let psi_u = d.catalog_psi(CatalogEntry::Universal).unwrap();
        let v = check_vmr_validity(&user("x/2", 1.0), &psi_u, 0.5, g.points()[0], &g, 1e-2);
        assert_eq!(v.verdict, Validity::Invalid);
        let same = check_vmr_validity(&psi_u, &psi_u, 0.5, g.points()[0], &g, 1e-2);
        assert_eq!(same.verdict, Validity::Valid);
        assert_eq!(same.k_z, Some(0.0));
    }

    #[test]
    fn vmr_requires_p_gamma() {
        let g = inf_grid();
        let v = check_vmr_validity(&user("1", 0.0), &user("1", 0.0), 1.0, 2.0, &g, 1e-2);
        assert_eq!(v.verdict, Validity::Invalid);
        assert_eq!(v.reason, Some(VmrReason::PGamma(Check::Fail)));
        assert!(v.k_trail.is_none());
    }

    #[test]
    fn vmr_panel_failure_is_inconclusive() {
        let g = inf_grid();
        let psi = user("1/x", 0.0);
        let broken = user("1/log(x-100)", 0.0);
        let v = check_vmr_given_p_gamma(&psi, &broken, Check::Pass, 2.0, &g, 1e-2);
        assert_eq!(v.verdict, Validity::Inconclusive);
        assert!(matches!(v.reason, Some(VmrReason::Singularity { .. })));
    }

    #[test]
    fn validate_classifies() {
        let d = dist("gaussian");
        let psi_u = d.catalog_psi(CatalogEntry::Universal).unwrap();
        let r = validate(&d, &user("1/x", 0.0), &psi_u, &ValidateOptions::default()).unwrap();
        assert_eq!(r.classification(), Classification::VrOnly);
        assert_eq!(r.classification().exit_code(), 3);
        assert!(!r.consistency_flag);
        let r = validate(&d, &psi_u, &psi_u, &ValidateOptions::default()).unwrap();
        assert_eq!(r.classification(), Classification::VmrValid);
        let r = validate(&d, &user("2/x", 0.0), &psi_u, &ValidateOptions::default()).unwrap();
        assert_eq!(r.classification(), Classification::Invalid);
        let bad_z = ValidateOptions { z: Some(-1.0), ..ValidateOptions::default() };
        assert!(matches!(validate(&d, &psi_u, &psi_u, &bad_z), Err(ValidityError::BadZ { .. })));
    }

    #[test]
    fn gamma_from_psi() {
        let c = dist("cauchy");
        let e = estimate_gamma_from_psi(&c.catalog_psi(CatalogEntry::Universal).unwrap(), &c.default_grid(), 1e-2).unwrap();
        assert_relative_eq!(e.gamma, 1.0, max_relative = 1e-12);
        let b = dist("beta:p=2,q=2");
        let e = estimate_gamma_from_psi(&b.catalog_psi(CatalogEntry::Universal).unwrap(), &b.default_grid(), 1e-2).unwrap();
        assert_relative_eq!(e.gamma, -0.5, max_relative = 1e-9);
        let e = estimate_gamma_from_psi(&user("1/x", 0.0), &inf_grid(), 1e-2).unwrap();
        assert!(e.gamma.abs() < 1e-2);
        let osc = user("x*(1+(-1)^x)", 0.0);
        let pts: Vec<f64> = (1..=16).map(|k| k as f64).collect();
        let grid = ProbeGrid::from_points(pts, f64::INFINITY).unwrap();
        assert_eq!(estimate_gamma_from_psi(&osc, &grid, 1e-2).unwrap_err(), GammaError::Oscillatory);
    }

    #[test]
    fn von_mises_examples() {
        let e = dist("exponential_like");
        let v = check_von_mises_condition(&e, &e.default_grid(), 1e-2).unwrap();
        assert_eq!(v.verdict, Check::Pass);
        assert!(v.trail.values().iter().all(|&r| (r + 1.0).abs() <= 1e-12));
        let g = dist("gaussian");
        assert_eq!(check_von_mises_condition(&g, &g.default_grid(), 1e-2).unwrap().verdict, Check::Pass);
        let u = dist("uniform");
        let v = check_von_mises_condition(&u, &u.default_grid(), 1e-2).unwrap();
        assert_eq!(v.verdict, Check::Fail);
        assert!(v.trail.values().iter().all(|&r| r == 0.0));
        assert!(check_von_mises_condition(&g.tail_only(), &g.default_grid(), 1e-2).is_err());
    }
}
