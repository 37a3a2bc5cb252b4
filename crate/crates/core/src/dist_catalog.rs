//! Catalogued distributions in a max-domain of attraction.
//!
//! Every tail quantity goes through [`DistributionSpec::log_survival`], which
//! is evaluated in log space so that ratios `F̄(x+t)/F̄(x)` stay meaningful
//! far into the tail (the Gaussian at `x = 40` has `ln F̄ ≈ −804.6`).
//!
//! The `*_like` families use their asymptotic tail form as the exact
//! survival function, clipped to at most one.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{CatalogError, DomainError};
use crate::numerics::{bisect_decreasing, GridRule, ProbeGrid};
use crate::psi_expr::parse_psi;
use crate::scalar::Scalar;
use crate::special::{ln_beta, ln_beta_inc, ln_gamma, ln_gamma_q, ln_normal_pdf, ln_normal_sf};
use crate::universal_aux::{AuxKind, AuxiliaryFunction};

/// Offset keeping the loggamma support away from the `ln ln x` singularity at 1.
pub const LOGGAMMA_EPS: f64 = 1e-9;

/// Parameterised family; the parameters are validated on construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family<T> {
    Gaussian,
    Lognormal,
    ExponentialLike { lambda: T, k: T },
    Gamma { alpha: T, beta: T },
    WeibullLike { alpha: T, beta: T, tau: T, k: T },
    Loggamma { alpha: T, beta: T },
    Cauchy,
    ParetoLike { alpha: T, k: T },
    Beta { p: T, q: T },
    ParetoLikeFinite { alpha: T, k: T, x_e: T },
    Gev { gamma: T },
}

/// Which closed form to take from the catalog table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CatalogEntry {
    /// The universal auxiliary function ψ_u.
    Universal,
    /// The simpler VR-valid ψ listed alongside it.
    VrSimple,
}

impl CatalogEntry {
    pub fn as_str(self) -> &'static str {
        match self {
            CatalogEntry::Universal => "universal",
            CatalogEntry::VrSimple => "vr_simple",
        }
    }
}

/// One row of the printable catalog.
#[derive(Debug, Clone, Copy)]
pub struct CatalogRow {
    pub id: &'static str,
    pub params: &'static [&'static str],
    pub gamma: &'static str,
    pub x_e: &'static str,
    pub psi_u: &'static str,
    pub psi: &'static str,
}

/// The catalog as printed by the CLI `list` command.
pub const CATALOG: &[CatalogRow] = &[
    CatalogRow { id: "gaussian", params: &[], gamma: "0", x_e: "inf", psi_u: "x/(1+x^2)", psi: "1/x" },
    CatalogRow {
        id: "lognormal",
        params: &[],
        gamma: "0",
        x_e: "inf",
        psi_u: "x*log(x)/(1+log(x)^2)",
        psi: "x/log(x)",
    },
    CatalogRow {
        id: "exponential_like",
        params: &["lambda=1", "K=1"],
        gamma: "0",
        x_e: "inf",
        psi_u: "1/lambda",
        psi: "1/lambda",
    },
    CatalogRow {
        id: "gamma",
        params: &["alpha=<a>", "beta=1"],
        gamma: "0",
        x_e: "inf",
        psi_u: "x/(beta*x-alpha+1)",
        psi: "1/beta",
    },
    CatalogRow {
        id: "weibull_like",
        params: &["alpha=0", "beta=1", "tau=<t>", "K=1"],
        gamma: "0",
        x_e: "inf",
        psi_u: "x/(tau*(beta*x)^tau-alpha)",
        psi: "x^(1-tau)/(tau*beta^tau)",
    },
    CatalogRow {
        id: "loggamma",
        params: &["alpha=<a>", "beta=<b>"],
        gamma: "1/alpha",
        x_e: "inf",
        psi_u: "x*log(x)/(alpha*log(x)-beta+1)",
        psi: "x/alpha",
    },
    CatalogRow { id: "cauchy", params: &[], gamma: "1", x_e: "inf", psi_u: "x", psi: "x" },
    CatalogRow {
        id: "pareto_like",
        params: &["alpha=<a>", "K=1"],
        gamma: "1/alpha",
        x_e: "inf",
        psi_u: "x/alpha",
        psi: "x/alpha",
    },
    CatalogRow { id: "beta", params: &["p=<p>", "q=<q>"], gamma: "-1/q", x_e: "1", psi_u: "(1-x)/q", psi: "(1-x)/q" },
    CatalogRow {
        id: "pareto_like_finite",
        params: &["alpha=<a>", "K=1", "x_e=<x_e>"],
        gamma: "-1/alpha",
        x_e: "x_e",
        psi_u: "(x_e-x)/alpha",
        psi: "(x_e-x)/alpha",
    },
    CatalogRow {
        id: "gev",
        params: &["gamma=<g>"],
        gamma: "gamma",
        x_e: "inf if gamma>=0 else -1/gamma",
        psi_u: "1 (gamma=0), gamma*x (gamma>0), -gamma*(x_e-x) (gamma<0)",
        psi: "same as psi_u",
    },
    CatalogRow { id: "uniform", params: &[], gamma: "-1", x_e: "1", psi_u: "1-x", psi: "1-x" },
];

/// Ids accepted by [`make_distribution`].
pub fn catalog_ids() -> impl Iterator<Item = &'static str> {
    CATALOG.iter().map(|r| r.id)
}

/// A catalogued distribution. Immutable and cheap to clone.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionSpec<T> {
    id: String,
    family: Family<T>,
    params: BTreeMap<String, T>,
    gamma: T,
    x_e: T,
    support_lo: T,
    with_density: bool,
    with_zeta: bool,
}

/// Splits `name(:key=value(,key=value)*)?` into its id and parameter map.
pub fn parse_spec_string(input: &str) -> Result<(String, BTreeMap<String, f64>), CatalogError> {
    let bad = |reason: &str| CatalogError::SpecString { input: input.to_string(), reason: reason.to_string() };
    let trimmed = input.trim();
    let (name, rest) = match trimmed.split_once(':') {
        Some((n, r)) => (n.trim(), Some(r)),
        None => (trimmed, None),
    };
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Err(bad("expected a distribution name"));
    }
    let mut params = BTreeMap::new();
    if let Some(rest) = rest {
        if rest.trim().is_empty() {
            return Err(bad("expected key=value after ':'"));
        }
        for pair in rest.split(',') {
            let (k, v) = pair.split_once('=').ok_or_else(|| bad(&format!("`{}` is not key=value", pair.trim())))?;
            let k = k.trim();
            if k.is_empty() {
                return Err(bad("empty parameter name"));
            }
            let v: f64 = v.trim().parse().map_err(|_| bad(&format!("`{}` is not a real number", v.trim())))?;
            if !v.is_finite() {
                return Err(bad(&format!("parameter `{k}` must be finite")));
            }
            if params.insert(k.to_string(), v).is_some() {
                return Err(bad(&format!("parameter `{k}` given twice")));
            }
        }
    }
    Ok((name.to_string(), params))
}

fn canonical_param(name: &str) -> &str {
    match name {
        "k" => "K",
        "xe" => "x_e",
        other => other,
    }
}

struct ParamReader<'a> {
    dist: &'a str,
    given: BTreeMap<String, f64>,
}

impl ParamReader<'_> {
    fn take(&mut self, name: &str, default: Option<f64>, positive: bool) -> Result<f64, CatalogError> {
        let v = match self.given.remove(name) {
            Some(v) => v,
            None => default.ok_or_else(|| CatalogError::MissingParameter {
                dist: self.dist.to_string(),
                param: name.to_string(),
            })?,
        };
        if !v.is_finite() || (positive && v <= 0.0) {
            return Err(CatalogError::InvalidParameter {
                dist: self.dist.to_string(),
                param: name.to_string(),
                value: v,
                reason: if positive { "must be positive".into() } else { "must be finite".into() },
            });
        }
        Ok(v)
    }

    fn finish(self) -> Result<(), CatalogError> {
        match self.given.into_keys().next() {
            Some(param) => Err(CatalogError::UnexpectedParameter { dist: self.dist.to_string(), param }),
            None => Ok(()),
        }
    }
}

/// Builds a catalogued distribution from its id and parameters.
///
/// Defaults: `K = 1` for the `*_like` families, `lambda = 1`, gamma
/// `beta = 1`, weibull_like `alpha = 0, beta = 1`. The aliases `k` and `xe`
/// are accepted for `K` and `x_e`.
pub fn make_distribution<T: Scalar>(
    id: &str,
    params: BTreeMap<String, f64>,
) -> Result<DistributionSpec<T>, CatalogError> {
    let mut given = BTreeMap::new();
    for (k, v) in params {
        given.insert(canonical_param(&k).to_string(), v);
    }
    let mut r = ParamReader { dist: id, given };
    let l = T::lit;
    let family = match id {
        "gaussian" => Family::Gaussian,
        "lognormal" => Family::Lognormal,
        "exponential_like" => {
            let lambda = r.take("lambda", Some(1.0), true)?;
            let k = r.take("K", Some(1.0), true)?;
            Family::ExponentialLike { lambda: l(lambda), k: l(k) }
        }
        "gamma" => {
            let alpha = r.take("alpha", None, true)?;
            let beta = r.take("beta", Some(1.0), true)?;
            Family::Gamma { alpha: l(alpha), beta: l(beta) }
        }
        "weibull_like" => {
            let alpha = r.take("alpha", Some(0.0), false)?;
            let beta = r.take("beta", Some(1.0), true)?;
            let tau = r.take("tau", None, true)?;
            let k = r.take("K", Some(1.0), true)?;
            Family::WeibullLike { alpha: l(alpha), beta: l(beta), tau: l(tau), k: l(k) }
        }
        "loggamma" => {
            let alpha = r.take("alpha", None, true)?;
            let beta = r.take("beta", None, true)?;
            Family::Loggamma { alpha: l(alpha), beta: l(beta) }
        }
        "cauchy" => Family::Cauchy,
        "pareto_like" => {
            let alpha = r.take("alpha", None, true)?;
            let k = r.take("K", Some(1.0), true)?;
            Family::ParetoLike { alpha: l(alpha), k: l(k) }
        }
        "beta" => {
            let p = r.take("p", None, true)?;
            let q = r.take("q", None, true)?;
            Family::Beta { p: l(p), q: l(q) }
        }
        "pareto_like_finite" => {
            let alpha = r.take("alpha", None, true)?;
            let k = r.take("K", Some(1.0), true)?;
            let x_e = r.take("x_e", None, false)?;
            Family::ParetoLikeFinite { alpha: l(alpha), k: l(k), x_e: l(x_e) }
        }
        "uniform" => Family::ParetoLikeFinite { alpha: T::one(), k: T::one(), x_e: T::one() },
        "gev" => {
            let gamma = r.take("gamma", None, false)?;
            Family::Gev { gamma: l(gamma) }
        }
        other => return Err(CatalogError::UnknownDistribution(other.to_string())),
    };
    r.finish()?;
    Ok(DistributionSpec::from_family(id, family))
}

impl<T: Scalar> DistributionSpec<T> {
    /// Parses a spec string such as `gamma:alpha=2,beta=1`.
    pub fn from_spec_str(input: &str) -> Result<Self, CatalogError> {
        let (id, params) = parse_spec_string(input)?;
        make_distribution(&id, params)
    }

    fn from_family(id: &str, family: Family<T>) -> Self {
        let zero = T::zero();
        let one = T::one();
        let inf = T::infinity();
        let mut params = BTreeMap::new();
        let mut put = |k: &str, v: T| {
            params.insert(k.to_string(), v);
        };
        let (gamma, x_e, support_lo) = match family {
            Family::Gaussian => (zero, inf, T::neg_infinity()),
            Family::Lognormal => (zero, inf, zero),
            Family::ExponentialLike { lambda, k } => {
                put("lambda", lambda);
                put("K", k);
                (zero, inf, k.ln() / lambda)
            }
            Family::Gamma { alpha, beta } => {
                put("alpha", alpha);
                put("beta", beta);
                (zero, inf, zero)
            }
            Family::WeibullLike { alpha, beta, tau, k } => {
                put("alpha", alpha);
                put("beta", beta);
                put("tau", tau);
                put("K", k);
                (zero, inf, weibull_support_lo(alpha, beta, tau, k))
            }
            Family::Loggamma { alpha, beta } => {
                put("alpha", alpha);
                put("beta", beta);
                (one / alpha, inf, one + T::lit(LOGGAMMA_EPS))
            }
            Family::Cauchy => (one, inf, T::neg_infinity()),
            Family::ParetoLike { alpha, k } => {
                put("alpha", alpha);
                put("K", k);
                (one / alpha, inf, k.powf(one / alpha))
            }
            Family::Beta { p, q } => {
                put("p", p);
                put("q", q);
                (-one / q, one, zero)
            }
            Family::ParetoLikeFinite { alpha, k, x_e } => {
                if id != "uniform" {
                    put("alpha", alpha);
                    put("K", k);
                    put("x_e", x_e);
                }
                (-one / alpha, x_e, x_e - k.powf(-one / alpha))
            }
            Family::Gev { gamma } => {
                put("gamma", gamma);
                if gamma > zero {
                    (gamma, inf, -one / gamma)
                } else if gamma < zero {
                    (gamma, -one / gamma, T::neg_infinity())
                } else {
                    (zero, inf, T::neg_infinity())
                }
            }
        };
        DistributionSpec {
            id: id.to_string(),
            family,
            params,
            gamma,
            x_e,
            support_lo,
            with_density: true,
            with_zeta: true,
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn family(&self) -> Family<T> {
        self.family
    }

    pub fn params(&self) -> &BTreeMap<String, T> {
        &self.params
    }

    /// Extreme value index γ.
    pub fn gamma(&self) -> T {
        self.gamma
    }

    /// Right endpoint x_E (possibly `+∞`).
    pub fn x_e(&self) -> T {
        self.x_e
    }

    pub fn support_lo(&self) -> T {
        self.support_lo
    }

    pub fn has_finite_endpoint(&self) -> bool {
        self.x_e.is_finite()
    }

    pub fn has_density(&self) -> bool {
        self.with_density
    }

    pub fn has_zeta(&self) -> bool {
        self.with_zeta
    }

    /// Copy exposing only the survival function (no density, no ζ).
    pub fn tail_only(&self) -> Self {
        DistributionSpec { with_density: false, with_zeta: false, ..self.clone() }
    }

    /// `ln F̄(x)`; `−∞` at or beyond x_E and `0` below the support.
    pub fn log_survival(&self, x: T) -> T {
        if x.is_nan() {
            return x;
        }
        if x >= self.x_e {
            return T::neg_infinity();
        }
        if x < self.support_lo {
            return T::zero();
        }
        self.raw_log_survival(x).min(T::zero())
    }

    /// Like [`log_survival`](Self::log_survival) but reports out-of-support arguments.
    pub fn try_log_survival(&self, x: T) -> Result<T, DomainError> {
        if x >= self.x_e {
            return Err(DomainError::BeyondEndpoint { x: x.as_f64(), x_e: self.x_e.as_f64() });
        }
        if x < self.support_lo {
            return Err(DomainError::BelowSupport { x: x.as_f64(), support_lo: self.support_lo.as_f64() });
        }
        Ok(self.log_survival(x))
    }

    pub fn survival(&self, x: T) -> T {
        self.log_survival(x).exp()
    }

    fn raw_log_survival(&self, x: T) -> T {
        let one = T::one();
        match self.family {
            Family::Gaussian => ln_normal_sf(x),
            Family::Lognormal => ln_normal_sf(x.ln()),
            Family::ExponentialLike { lambda, k } => k.ln() - lambda * x,
            Family::Gamma { alpha, beta } => ln_gamma_q(alpha, beta * x),
            Family::WeibullLike { alpha, beta, tau, k } => k.ln() + xlogy(alpha, x) - (beta * x).powf(tau),
            Family::Loggamma { alpha, beta } => ln_gamma_q(beta, alpha * x.ln()),
            Family::Cauchy => (one.atan2(x) / T::PI()).ln(),
            Family::ParetoLike { alpha, k } => k.ln() - alpha * x.ln(),
            Family::Beta { p, q } => ln_beta_inc(q, p, one - x),
            Family::ParetoLikeFinite { alpha, k, x_e } => k.ln() + alpha * (x_e - x).ln(),
            Family::Gev { gamma } => gev_log_sf(gev_ln_t(gamma, x)),
        }
    }

    /// `ln F̄(x_E − d)` for a finite endpoint, computed from `d` directly so
    /// that no precision is lost to `x_E − d` when `d` is tiny.
    pub fn log_survival_below_endpoint(&self, d: T) -> T {
        if !(d > T::zero()) {
            return T::neg_infinity();
        }
        let x = self.x_e - d;
        if !self.x_e.is_finite() || x < self.support_lo {
            return self.log_survival(x);
        }
        let v = match self.family {
            Family::ParetoLikeFinite { alpha, k, .. } => k.ln() + alpha * d.ln(),
            Family::Beta { p, q } => ln_beta_inc(q, p, d),
            Family::Gev { gamma } => gev_log_sf(-(-gamma * d).ln() / gamma),
            _ => return self.log_survival(x),
        };
        v.min(T::zero())
    }

    /// `ln F̄(x + t) − ln F̄(x)` for `t ≥ 0`, formed from `t` directly where the
    /// family allows it, so that small increments far in the tail keep their digits.
    pub fn log_survival_increment(&self, x: T, t: T) -> T {
        let inside = x > self.support_lo && x > T::zero() && !self.x_e.is_finite();
        if !inside || !(t >= T::zero()) {
            return self.log_survival(x + t) - self.log_survival(x);
        }
        let r = (t / x).ln_1p();
        match self.family {
            Family::ExponentialLike { lambda, .. } => -lambda * t,
            Family::ParetoLike { alpha, .. } => -alpha * r,
            Family::WeibullLike { alpha, beta, tau, .. } => alpha * r - (beta * x).powf(tau) * (tau * r).exp_m1(),
            _ => self.log_survival(x + t) - self.log_survival(x),
        }
    }

    fn in_open_support(&self, x: T) -> bool {
        x < self.x_e && x > self.support_lo
    }

    /// `ln f(x)`, or `None` when the density is not exposed.
    pub fn log_density(&self, x: T) -> Option<T> {
        if !self.with_density {
            return None;
        }
        if !self.in_open_support(x) {
            return Some(T::neg_infinity());
        }
        let one = T::one();
        let v = match self.family {
            Family::Gaussian => ln_normal_pdf(x),
            Family::Lognormal => ln_normal_pdf(x.ln()) - x.ln(),
            Family::ExponentialLike { lambda, .. } => lambda.ln() + self.log_survival(x),
            Family::Gamma { alpha, beta } => {
                alpha * beta.ln() + (alpha - one) * x.ln() - beta * x - ln_gamma(alpha)
            }
            Family::WeibullLike { alpha, beta, tau, .. } => {
                let h = tau * beta.powf(tau) * x.powf(tau - one) - alpha / x;
                self.log_survival(x) + h.ln()
            }
            Family::Loggamma { alpha, beta } => {
                beta * alpha.ln() - ln_gamma(beta) + (beta - one) * x.ln().ln() - (alpha + one) * x.ln()
            }
            Family::Cauchy => -T::PI().ln() - (x * x).ln_1p(),
            Family::ParetoLike { alpha, .. } => alpha.ln() - x.ln() + self.log_survival(x),
            Family::Beta { p, q } => (p - one) * x.ln() + (q - one) * (-x).ln_1p() - ln_beta(p, q),
            Family::ParetoLikeFinite { alpha, x_e, .. } => alpha.ln() - (x_e - x).ln() + self.log_survival(x),
            Family::Gev { gamma } => {
                let ln_t = gev_ln_t(gamma, x);
                (one + gamma) * ln_t - ln_t.exp()
            }
        };
        Some(v)
    }

    pub fn density(&self, x: T) -> Option<T> {
        self.log_density(x).map(|v| v.exp())
    }

    /// Score `f′(x)/f(x)`.
    pub fn density_score(&self, x: T) -> Option<T> {
        if !self.with_density || !self.in_open_support(x) {
            return None;
        }
        let one = T::one();
        let two = T::lit(2.0);
        let v = match self.family {
            Family::Gaussian => -x,
            Family::Lognormal => -(x.ln() + one) / x,
            Family::ExponentialLike { lambda, .. } => -lambda,
            Family::Gamma { alpha, beta } => (alpha - one) / x - beta,
            Family::WeibullLike { alpha, beta, tau, .. } => {
                let bt = beta.powf(tau);
                let h = tau * bt * x.powf(tau - one) - alpha / x;
                let dh = tau * (tau - one) * bt * x.powf(tau - two) + alpha / (x * x);
                (dh - h * h) / h
            }
            Family::Loggamma { alpha, beta } => -(alpha + one) / x + (beta - one) / (x * x.ln()),
            Family::Cauchy => -two * x / (one + x * x),
            Family::ParetoLike { alpha, .. } => -(alpha + one) / x,
            Family::Beta { p, q } => (p - one) / x - (q - one) / (one - x),
            Family::ParetoLikeFinite { alpha, x_e, .. } => -(alpha - one) / (x_e - x),
            Family::Gev { gamma } => {
                let ln_t = gev_ln_t(gamma, x);
                -(one + gamma) * (gamma * ln_t).exp() + ((one + gamma) * ln_t).exp()
            }
        };
        Some(v)
    }

    /// `F″(x) = f′(x)`.
    pub fn density_derivative(&self, x: T) -> Option<T> {
        if !self.with_density {
            return None;
        }
        if !self.in_open_support(x) {
            return Some(T::zero());
        }
        Some(self.density(x)? * self.density_score(x)?)
    }

    /// `ln ζ(x)` for the registered asymptotic equivalent of F̄; `None` when
    /// ζ is not exposed or undefined at `x`.
    pub fn log_zeta(&self, x: T) -> Option<T> {
        if !self.with_zeta {
            return None;
        }
        let one = T::one();
        let v = match self.family {
            Family::Gaussian => ln_normal_pdf(x) - x.ln(),
            Family::Lognormal => ln_normal_pdf(x.ln()) - x.ln().ln(),
            Family::ExponentialLike { lambda, k } => k.ln() - lambda * x,
            Family::Gamma { alpha, beta } => (alpha - one) * (beta * x).ln() - beta * x - ln_gamma(alpha),
            Family::WeibullLike { alpha, beta, tau, k } => k.ln() + xlogy(alpha, x) - (beta * x).powf(tau),
            Family::Loggamma { alpha, beta } => {
                (beta - one) * alpha.ln() - ln_gamma(beta) - alpha * x.ln() + (beta - one) * x.ln().ln()
            }
            Family::Cauchy => -(T::PI() * x).ln(),
            Family::ParetoLike { alpha, k } => k.ln() - alpha * x.ln(),
            Family::Beta { p, q } => -ln_beta(p, q) - q.ln() + q * (one - x).ln(),
            Family::ParetoLikeFinite { alpha, k, x_e } => k.ln() + alpha * (x_e - x).ln(),
            Family::Gev { gamma } => {
                if gamma == T::zero() {
                    -x
                } else if gamma > T::zero() {
                    -(gamma * x).ln() / gamma
                } else {
                    -(-gamma * (self.x_e - x)).ln() / gamma
                }
            }
        };
        v.is_finite().then_some(v)
    }

    /// ζ(x).
    pub fn zeta(&self, x: T) -> Result<T, CatalogError> {
        if !self.with_zeta {
            return Err(CatalogError::NoZeta(self.id.clone()));
        }
        Ok(self.log_zeta(x).map(|v| v.exp()).unwrap_or(T::nan()))
    }

    /// Analytic `(ln ζ)′(x)`.
    pub fn zeta_log_derivative(&self, x: T) -> Option<T> {
        if !self.with_zeta {
            return None;
        }
        let one = T::one();
        let v = match self.family {
            Family::Gaussian => -x - one / x,
            Family::Lognormal => -x.ln() / x - one / (x * x.ln()),
            Family::ExponentialLike { lambda, .. } => -lambda,
            Family::Gamma { alpha, beta } => (alpha - one) / x - beta,
            Family::WeibullLike { alpha, beta, tau, .. } => alpha / x - tau * beta.powf(tau) * x.powf(tau - one),
            Family::Loggamma { alpha, beta } => -alpha / x + (beta - one) / (x * x.ln()),
            Family::Cauchy => -one / x,
            Family::ParetoLike { alpha, .. } => -alpha / x,
            Family::Beta { q, .. } => -q / (one - x),
            Family::ParetoLikeFinite { alpha, x_e, .. } => -alpha / (x_e - x),
            Family::Gev { gamma } => {
                if gamma == T::zero() {
                    -one
                } else if gamma > T::zero() {
                    -one / (gamma * x)
                } else {
                    one / (gamma * (self.x_e - x))
                }
            }
        };
        v.is_finite().then_some(v)
    }

    /// Source text of a catalog closed form.
    pub fn catalog_expr(&self, which: CatalogEntry) -> &'static str {
        let (u, s) = match self.family {
            Family::Gaussian => ("x/(1+x^2)", "1/x"),
            Family::Lognormal => ("x*log(x)/(1+log(x)^2)", "x/log(x)"),
            Family::ExponentialLike { .. } => ("1/lambda", "1/lambda"),
            Family::Gamma { .. } => ("x/(beta*x-alpha+1)", "1/beta"),
            Family::WeibullLike { .. } => ("x/(tau*(beta*x)^tau-alpha)", "x^(1-tau)/(tau*beta^tau)"),
            Family::Loggamma { .. } => ("x*log(x)/(alpha*log(x)-beta+1)", "x/alpha"),
            Family::Cauchy => ("x", "x"),
            Family::ParetoLike { .. } => ("x/alpha", "x/alpha"),
            Family::Beta { .. } => ("(1-x)/q", "(1-x)/q"),
            Family::ParetoLikeFinite { .. } => {
                if self.id == "uniform" {
                    ("1-x", "1-x")
                } else {
                    ("(x_e-x)/alpha", "(x_e-x)/alpha")
                }
            }
            Family::Gev { gamma } => {
                let e = if gamma == T::zero() {
                    "1"
                } else if gamma > T::zero() {
                    "gamma*x"
                } else {
                    "-gamma*(x_e-x)"
                };
                (e, e)
            }
        };
        match which {
            CatalogEntry::Universal => u,
            CatalogEntry::VrSimple => s,
        }
    }

    /// Values where the catalog ψ_u denominator vanishes.
    pub fn catalog_poles(&self) -> Vec<T> {
        let one = T::one();
        match self.family {
            Family::Gamma { alpha, beta } => vec![(alpha - one) / beta],
            Family::WeibullLike { alpha, beta, tau, .. } if alpha > T::zero() => {
                vec![(alpha / tau).powf(one / tau) / beta]
            }
            Family::Loggamma { alpha, beta } => vec![((beta - one) / alpha).exp()],
            _ => Vec::new(),
        }
    }

    /// Start of the tail region in which the catalog ψ_u is positive and all
    /// tail evaluators are well defined.
    pub fn tail_start(&self) -> T {
        let domain_lo = match self.family {
            Family::Gaussian | Family::Cauchy => T::zero(),
            Family::Lognormal | Family::Loggamma { .. } => T::one(),
            Family::Gev { gamma } if gamma >= T::zero() => T::zero(),
            _ => T::neg_infinity(),
        };
        let mut lo = self.support_lo.max(domain_lo);
        for p in self.catalog_poles() {
            lo = lo.max(p);
        }
        if lo == T::neg_infinity() {
            return self.x_e - self.endpoint_span();
        }
        lo + T::lit(1e-9) * T::one().max(lo.abs())
    }

    /// Length of the region used to place the finite-endpoint grid.
    fn endpoint_span(&self) -> T {
        if self.support_lo.is_finite() {
            self.x_e - self.support_lo
        } else {
            T::one() / self.gamma.abs()
        }
    }

    /// Closed form from the catalog, bound to this distribution's parameters.
    pub fn catalog_psi(&self, which: CatalogEntry) -> Result<AuxiliaryFunction<T>, CatalogError> {
        let src = self.catalog_expr(which);
        let expr = parse_psi(src).map_err(|e| CatalogError::NoCatalogEntry {
            dist: self.id.clone(),
            which: format!("{} ({e})", which.as_str()),
        })?;
        let mut bindings = self.params.clone();
        if self.x_e.is_finite() {
            bindings.insert("x_e".to_string(), self.x_e);
        }
        let f = expr.bind(&bindings).map_err(|e| CatalogError::NoCatalogEntry {
            dist: self.id.clone(),
            which: format!("{} ({e})", which.as_str()),
        })?;
        Ok(AuxiliaryFunction::new(f, self.tail_start(), AuxKind::Catalog)
            .with_source(src)
            .with_poles(self.catalog_poles())
            .with_label(format!("{src} [{} catalog, {}]", which.as_str(), self.id)))
    }

    /// Probe grid used when the caller does not supply one.
    pub fn default_grid(&self) -> ProbeGrid<T> {
        ProbeGrid::new(self.default_grid_rule(), self.x_e).expect("default grid rules are valid")
    }

    pub fn default_grid_rule(&self) -> GridRule<T> {
        let l = T::lit;
        if self.x_e.is_finite() {
            let start = self.tail_start().max(self.support_lo);
            let span = if start.is_finite() { self.x_e - start } else { self.endpoint_span() };
            GridRule::TowardEndpoint { d0: l(0.25) * span, shrink: l(0.5), count: 16 }
        } else {
            match self.family {
                Family::Lognormal | Family::Loggamma { .. } => {
                    GridRule::LogGeometric { e0: l(1.5), ratio: l(1.5), count: 16 }
                }
                _ => {
                    let s = self.tail_start();
                    let x0 = if s > T::zero() { l(2.0).max(l(2.0) * s) } else { l(2.0) };
                    GridRule::Geometric { x0, ratio: l(1.5), count: 16 }
                }
            }
        }
    }
}

impl<T: Scalar> fmt::Display for DistributionSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id)?;
        let mut sep = ':';
        for (k, v) in &self.params {
            write!(f, "{sep}{k}={v}")?;
            sep = ',';
        }
        Ok(())
    }
}

/// `a·ln x` with the convention `0·ln 0 = 0`.
fn xlogy<T: Scalar>(a: T, x: T) -> T {
    if a == T::zero() {
        T::zero()
    } else {
        a * x.ln()
    }
}

/// `ln t(x)` for the GEV with `t = (1+γx)^{−1/γ}` (or `e^{−x}`).
/// `ln(1 − exp(−t))` from `ln t`.
fn gev_log_sf<T: Scalar>(ln_t: T) -> T {
    let t = ln_t.exp();
    if ln_t < T::lit(-30.0) {
        ln_t - T::lit(0.5) * t
    } else {
        (-(-t).exp_m1()).ln()
    }
}

fn gev_ln_t<T: Scalar>(gamma: T, x: T) -> T {
    if gamma == T::zero() {
        -x
    } else {
        -(gamma * x).ln_1p() / gamma
    }
}

/// Lower end of the support of `K x^α exp(−(βx)^τ)` clipped to one: the
/// point on the decreasing branch where the function crosses one, or the
/// location of its maximum when it never exceeds one (an atom there).
fn weibull_support_lo<T: Scalar>(alpha: T, beta: T, tau: T, k: T) -> T {
    let g = |x: T| k.ln() + xlogy(alpha, x) - (beta * x).powf(tau);
    let zero = T::zero();
    let start = if alpha > zero { (alpha / tau).powf(T::one() / tau) / beta } else { zero };
    if alpha >= zero && g(start) <= zero {
        return start;
    }
    if alpha == zero {
        return k.ln().powf(T::one() / tau) / beta;
    }
    let mut hi = if start > zero { start * T::lit(2.0) } else { T::one() };
    while g(hi) > zero {
        hi = hi * T::lit(2.0);
    }
    let mut lo = if start > zero { start } else { hi };
    while alpha < zero && g(lo) <= zero {
        lo = lo * T::lit(0.5);
    }
    bisect_decreasing(g, lo, hi, zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn dist(s: &str) -> DistributionSpec<f64> {
        DistributionSpec::from_spec_str(s).unwrap()
    }

    #[test]
    fn construction_examples() {
        let c = dist("cauchy");
        assert_eq!(c.gamma(), 1.0);
        assert_eq!(c.x_e(), f64::INFINITY);
        let b = dist("beta:p=2,q=2");
        assert_eq!(b.gamma(), -0.5);
        assert_eq!(b.x_e(), 1.0);
        let g = dist("gev:gamma=0");
        assert_eq!(g.x_e(), f64::INFINITY);
        assert_relative_eq!(g.survival(0.0), 1.0 - (-1.0_f64).exp(), max_relative = 1e-15);
    }

    #[test]
    fn extreme_value_indices() {
        for s in ["gaussian", "lognormal", "exponential_like", "gamma:alpha=2", "weibull_like:tau=2", "gev:gamma=0"] {
            assert_eq!(dist(s).gamma(), 0.0, "{s}");
        }
        assert_eq!(dist("loggamma:alpha=2,beta=3").gamma(), 0.5);
        assert_eq!(dist("pareto_like:alpha=4").gamma(), 0.25);
        assert_eq!(dist("pareto_like_finite:alpha=2,x_e=3").gamma(), -0.5);
        assert_eq!(dist("pareto_like_finite:alpha=2,x_e=3").x_e(), 3.0);
        assert_eq!(dist("gev:gamma=-0.5").x_e(), 2.0);
        assert_eq!(dist("uniform").gamma(), -1.0);
    }

    #[test]
    fn construction_errors_name_the_offender() {
        assert_eq!(
            make_distribution::<f64>("weibull", BTreeMap::new()),
            Err(CatalogError::UnknownDistribution("weibull".into()))
        );
        match DistributionSpec::<f64>::from_spec_str("weibull_like:tau=0") {
            Err(CatalogError::InvalidParameter { param, .. }) => assert_eq!(param, "tau"),
            other => panic!("{other:?}"),
        }
        match DistributionSpec::<f64>::from_spec_str("gamma") {
            Err(CatalogError::MissingParameter { param, .. }) => assert_eq!(param, "alpha"),
            other => panic!("{other:?}"),
        }
        match DistributionSpec::<f64>::from_spec_str("cauchy:alpha=1") {
            Err(CatalogError::UnexpectedParameter { param, .. }) => assert_eq!(param, "alpha"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            DistributionSpec::<f64>::from_spec_str("gamma:alpha"),
            Err(CatalogError::SpecString { .. })
        ));
        assert!(matches!(
            DistributionSpec::<f64>::from_spec_str("gamma:alpha=two"),
            Err(CatalogError::SpecString { .. })
        ));
        assert!(matches!(DistributionSpec::<f64>::from_spec_str(""), Err(CatalogError::SpecString { .. })));
    }

    #[test]
    fn spec_string_grammar() {
        let (id, p) = parse_spec_string("gamma:alpha=2,beta=1e-1").unwrap();
        assert_eq!(id, "gamma");
        assert_eq!(p["alpha"], 2.0);
        assert_eq!(p["beta"], 0.1);
        let d = dist("exponential_like:lambda=2,k=3");
        assert_eq!(d.params()["K"], 3.0);
        assert_eq!(d.to_string(), "exponential_like:K=3,lambda=2");
        assert_eq!(dist(&d.to_string()), d);
    }

    #[test]
    fn endpoint_distance_form_agrees() {
        for spec in ["beta:p=2,q=3", "pareto_like_finite:alpha=0.5,x_e=2", "gev:gamma=-0.5", "uniform"] {
            let d = dist(spec);
            for &gap in &[0.5, 0.1, 1e-3] {
                let a = d.log_survival_below_endpoint(gap);
                let b = d.log_survival(d.x_e() - gap);
                assert!((a - b).abs() <= 1e-10 * b.abs().max(1.0), "{spec} {gap}: {a} vs {b}");
            }
            assert_eq!(d.log_survival_below_endpoint(0.0), f64::NEG_INFINITY);
        }
        let p = dist("pareto_like_finite:alpha=0.5,x_e=1");
        assert_eq!(p.log_survival_below_endpoint(1e-300), 0.5 * (1e-300f64).ln());
    }

    #[test]
    fn increment_form_agrees() {
        for spec in ["exponential_like:lambda=2", "pareto_like:alpha=3", "weibull_like:alpha=1,beta=1,tau=2", "gaussian"] {
            let d = dist(spec);
            for &(x, t) in &[(1.5, 0.5), (3.0, 2.0), (0.7, 1e-3)] {
                let a = d.log_survival_increment(x, t);
                let b = d.log_survival(x + t) - d.log_survival(x);
                assert!((a - b).abs() <= 1e-10 * b.abs().max(1.0), "{spec} ({x}, {t}): {a} vs {b}");
            }
        }
        // -(x+t)^2 + x^2 = -2xt - t^2, exact even where x^2 swamps t
        let w = dist("weibull_like:alpha=0,beta=1,tau=2");
        let (x, t) = (1e4, 1e-9);
        assert!((w.log_survival_increment(x, t) + 2.0 * x * t).abs() < 1e-15);
    }

    #[test]
    fn log_survival_examples() {
        assert_relative_eq!(dist("exponential_like").log_survival(1.0), -1.0, max_relative = 1e-15);
        assert_relative_eq!(dist("pareto_like:alpha=2").log_survival(10.0), 0.01_f64.ln(), max_relative = 1e-15);
        assert_relative_eq!(dist("gaussian").log_survival(0.0), 0.5_f64.ln(), max_relative = 1e-15);
        assert_relative_eq!(dist("gaussian").log_survival(40.0), -804.608_442_013_753_8, max_relative = 1e-14);
    }

    #[test]
    fn log_survival_out_of_support_is_flagged() {
        let b = dist("beta:p=2,q=2");
        assert_eq!(b.log_survival(1.0), f64::NEG_INFINITY);
        assert!(matches!(b.try_log_survival(1.5), Err(DomainError::BeyondEndpoint { .. })));
        assert_eq!(b.log_survival(-1.0), 0.0);
        assert!(matches!(b.try_log_survival(-1.0), Err(DomainError::BelowSupport { .. })));
        assert!(b.try_log_survival(0.5).is_ok());
    }

    #[test]
    fn zeta_examples() {
        assert_relative_eq!(dist("gaussian").zeta(2.0).unwrap(), 0.053_990_966_513_188_06 / 2.0, max_relative = 1e-12);
        assert_relative_eq!(dist("cauchy").zeta(10.0).unwrap(), 1.0 / (10.0 * std::f64::consts::PI), max_relative = 1e-14);
        assert_relative_eq!(dist("beta:p=2,q=2").zeta(0.9).unwrap(), 0.03, max_relative = 1e-12);
        assert!(matches!(dist("gaussian").tail_only().zeta(2.0), Err(CatalogError::NoZeta(_))));
    }

    #[test]
    fn gev_survival_matches_closed_form() {
        for &g in &[0.5, -0.5, 0.2, -0.3] {
            let d = dist(&format!("gev:gamma={g}"));
            for &x in &[-1.0, 0.0, 0.5, 1.0, 1.9, 3.0] {
                let arg: f64 = 1.0 + g * x;
                if arg <= 0.0 {
                    continue;
                }
                let exact = 1.0 - (-arg.powf(-1.0 / g)).exp();
                if exact > 0.0 {
                    assert!((d.survival(x) - exact).abs() <= 1e-12, "gamma={g} x={x}");
                }
            }
        }
    }

    #[test]
    fn catalog_zeta_tracks_survival() {
        for s in [
            "gaussian",
            "lognormal",
            "exponential_like:lambda=2,K=1",
            "gamma:alpha=2",
            "weibull_like:alpha=1,tau=2",
            "loggamma:alpha=2,beta=3",
            "cauchy",
            "pareto_like:alpha=2",
            "beta:p=2,q=2",
            "pareto_like_finite:alpha=2,x_e=1",
            "gev:gamma=0",
            "gev:gamma=0.5",
            "gev:gamma=-0.5",
        ] {
            let d = dist(s);
            let grid = d.default_grid();
            let last = *grid.points().last().unwrap();
            let r = (d.log_survival(last) - d.log_zeta(last).unwrap()).exp();
            assert!((r - 1.0).abs() <= 1e-2, "{s}: {r}");
        }
    }

    #[test]
    fn weibull_support_cases() {
        // maximum of x e^{-x^2} is below one: atom at the mode
        let d = dist("weibull_like:alpha=1,tau=2");
        assert_relative_eq!(d.support_lo(), 0.5_f64.sqrt(), max_relative = 1e-12);
        let d = dist("weibull_like:alpha=0,tau=2,K=4");
        assert_relative_eq!(d.support_lo(), 4.0_f64.ln().sqrt(), max_relative = 1e-12);
        assert_relative_eq!(d.log_survival(d.support_lo()), 0.0, epsilon = 1e-12);
        let d = dist("weibull_like:alpha=-1,tau=1");
        let s = d.support_lo();
        assert!(s > 0.0);
        assert!((-s.ln() - s).abs() < 1e-9);
        let d = dist("weibull_like:alpha=2,tau=1,K=5");
        assert!((5.0_f64.ln() + 2.0 * d.support_lo().ln() - d.support_lo()).abs() < 1e-9);
    }

    #[test]
    fn densities_and_scores() {
        let g = dist("gaussian");
        assert_relative_eq!(g.density(0.0).unwrap(), 1.0 / (2.0 * std::f64::consts::PI).sqrt(), max_relative = 1e-14);
        let e = dist("exponential_like:lambda=2");
        assert_relative_eq!(e.density(1.0).unwrap(), 2.0 * (-2.0_f64).exp(), max_relative = 1e-14);
        assert_eq!(dist("uniform").density_derivative(0.3), Some(0.0));
        assert_eq!(dist("gaussian").tail_only().log_density(1.0), None);
        // score against a finite difference of the log density
        for (s, x) in [
            ("lognormal", 3.0),
            ("gamma:alpha=2.5,beta=1.5", 2.0),
            ("weibull_like:alpha=1,beta=2,tau=1.5", 1.3),
            ("loggamma:alpha=2,beta=3", 4.0),
            ("cauchy", 2.0),
            ("pareto_like:alpha=3", 2.0),
            ("beta:p=2.5,q=3", 0.4),
            ("pareto_like_finite:alpha=3,x_e=2", 1.5),
            ("gev:gamma=0.3", 1.0),
            ("gev:gamma=-0.3", 1.0),
            ("gev:gamma=0", 1.0),
        ] {
            let d = dist(s);
            let h = 1e-5;
            let fd = (d.log_density(x + h).unwrap() - d.log_density(x - h).unwrap()) / (2.0 * h);
            assert_relative_eq!(d.density_score(x).unwrap(), fd, max_relative = 1e-6);
        }
    }

    #[test]
    fn zeta_log_derivative_matches_finite_difference() {
        for (s, x) in [
            ("gaussian", 3.0),
            ("lognormal", 5.0),
            ("gamma:alpha=2", 3.0),
            ("weibull_like:alpha=1,tau=2", 2.0),
            ("loggamma:alpha=2,beta=3", 6.0),
            ("beta:p=2,q=3", 0.7),
            ("pareto_like_finite:alpha=2,x_e=1", 0.5),
            ("gev:gamma=0.5", 2.0),
            ("gev:gamma=-0.5", 1.0),
        ] {
            let d = dist(s);
            let h = 1e-5;
            let fd = (d.log_zeta(x + h).unwrap() - d.log_zeta(x - h).unwrap()) / (2.0 * h);
            assert_relative_eq!(d.zeta_log_derivative(x).unwrap(), fd, max_relative = 1e-6);
        }
    }

    #[test]
    fn catalog_listing_covers_every_id() {
        assert!(CATALOG.len() >= 11);
        for id in catalog_ids() {
            let needs: BTreeMap<String, f64> = match id {
                "gamma" => [("alpha".into(), 2.0)].into(),
                "weibull_like" => [("tau".into(), 2.0)].into(),
                "loggamma" => [("alpha".into(), 2.0), ("beta".into(), 3.0)].into(),
                "pareto_like" => [("alpha".into(), 2.0)].into(),
                "beta" => [("p".into(), 2.0), ("q".into(), 2.0)].into(),
                "pareto_like_finite" => [("alpha".into(), 2.0), ("x_e".into(), 1.0)].into(),
                "gev" => [("gamma".into(), 0.0)].into(),
                _ => BTreeMap::new(),
            };
            let d = make_distribution::<f64>(id, needs).unwrap();
            let psi = d.catalog_psi(CatalogEntry::Universal).unwrap();
            for &x in d.default_grid().points() {
                assert!(psi.eval(x).unwrap() > 0.0, "{id} at {x}");
            }
        }
    }

    #[test]
    fn grid_choices() {
        assert!(matches!(dist("lognormal").default_grid_rule(), GridRule::LogGeometric { .. }));
        assert!(matches!(dist("beta:p=2,q=2").default_grid_rule(), GridRule::TowardEndpoint { .. }));
        let g = dist("gev:gamma=-0.5").default_grid();
        assert!(*g.points().last().unwrap() < 2.0);
        assert_eq!(dist("gaussian").default_grid().points()[0], 2.0);
    }

    #[test]
    fn single_precision_catalog() {
        let d = DistributionSpec::<f32>::from_spec_str("pareto_like:alpha=2").unwrap();
        assert!((d.log_survival(10.0_f32) - 0.01_f32.ln()).abs() < 1e-5);
    }
}
