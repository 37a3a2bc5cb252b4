//! Construction of auxiliary functions.
//!
//! Universal auxiliary functions ψ_u come from four routes: an asymptotic
//! equivalent ζ of the survival function, the reciprocal hazard, explicit
//! tail-integral formulas, or the closed forms stored in the catalog. The
//! classic VR-valid forms (mean excess, double mean excess and the linear
//! forms in γ) are built here as well.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::dist_catalog::{CatalogEntry, DistributionSpec};
use crate::error::{CatalogError, EvalError};
use crate::numerics::{self, QuadOptions, TailMode};
use crate::scalar::Scalar;

/// Point-wise evaluator shared by every auxiliary function.
pub type PsiFn<T> = Arc<dyn Fn(T) -> Result<T, EvalError> + Send + Sync>;

/// How an auxiliary function was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AuxKind {
    FromZeta,
    ReciprocalHazard,
    IntegralGumbel,
    IntegralFrechet,
    IntegralWeibull,
    MeanExcess,
    DoubleMeanExcess,
    LinearGamma,
    Catalog,
    UserExpression,
}

impl AuxKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AuxKind::FromZeta => "from_zeta",
            AuxKind::ReciprocalHazard => "reciprocal_hazard",
            AuxKind::IntegralGumbel => "integral_gumbel",
            AuxKind::IntegralFrechet => "integral_frechet",
            AuxKind::IntegralWeibull => "integral_weibull",
            AuxKind::MeanExcess => "mean_excess",
            AuxKind::DoubleMeanExcess => "double_mean_excess",
            AuxKind::LinearGamma => "linear_gamma",
            AuxKind::Catalog => "catalog",
            AuxKind::UserExpression => "user_expression",
        }
    }
}

impl fmt::Display for AuxKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An evaluable auxiliary function ψ, positive beyond `x_star`.
#[derive(Clone)]
pub struct AuxiliaryFunction<T> {
    f: PsiFn<T>,
    x_star: T,
    kind: AuxKind,
    source_expr: Option<String>,
    poles: Vec<T>,
    label: Option<String>,
}

impl<T: Scalar> AuxiliaryFunction<T> {
    pub fn new<F>(f: F, x_star: T, kind: AuxKind) -> Self
    where
        F: Fn(T) -> Result<T, EvalError> + Send + Sync + 'static,
    {
        AuxiliaryFunction { f: Arc::new(f), x_star, kind, source_expr: None, poles: Vec::new(), label: None }
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.source_expr = Some(source.into());
        self
    }

    pub fn with_poles(mut self, poles: Vec<T>) -> Self {
        self.poles = poles;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn with_x_star(mut self, x_star: T) -> Self {
        self.x_star = x_star;
        self
    }

    #[inline]
    pub fn eval(&self, x: T) -> Result<T, EvalError> {
        (self.f)(x)
    }

    pub fn x_star(&self) -> T {
        self.x_star
    }

    pub fn kind(&self) -> AuxKind {
        self.kind
    }

    pub fn source_expr(&self) -> Option<&str> {
        self.source_expr.as_deref()
    }

    pub fn poles(&self) -> &[T] {
        &self.poles
    }

    /// Human-readable description: the label, else the source text, else the kind.
    pub fn describe(&self) -> String {
        if let Some(l) = &self.label {
            return l.clone();
        }
        match &self.source_expr {
            Some(s) => s.clone(),
            None => self.kind.as_str().to_string(),
        }
    }

    /// `k·ψ`, keeping the domain and provenance.
    pub fn scaled(&self, k: T) -> Self {
        let f = Arc::clone(&self.f);
        let mut out = self.clone();
        out.f = Arc::new(move |x| f(x).map(|v| k * v));
        out.label = Some(format!("{}*({})", k, self.describe()));
        out
    }

    /// `ψ·(1 + d(x))` for a caller-supplied perturbation `d`.
    pub fn perturbed<D>(&self, d: D, label: impl Into<String>) -> Self
    where
        D: Fn(T) -> T + Send + Sync + 'static,
    {
        let f = Arc::clone(&self.f);
        let mut out = self.clone();
        out.f = Arc::new(move |x| f(x).map(|v| v * (T::one() + d(x))));
        out.label = Some(label.into());
        out
    }

    /// Shared handle to the evaluator.
    pub fn evaluator(&self) -> PsiFn<T> {
        Arc::clone(&self.f)
    }
}

impl<T: Scalar> fmt::Debug for AuxiliaryFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AuxiliaryFunction")
            .field("kind", &self.kind)
            .field("x_star", &self.x_star)
            .field("source_expr", &self.source_expr)
            .field("poles", &self.poles)
            .field("label", &self.label)
            .finish()
    }
}

/// `ψ_u = −ζ/ζ′` with ζ′ from a central difference.
pub fn psi_from_zeta<T, Z>(zeta: Z, x_star: T) -> AuxiliaryFunction<T>
where
    T: Scalar,
    Z: Fn(T) -> Result<T, EvalError> + Send + Sync + 'static,
{
    let zeta = Arc::new(zeta);
    let z2 = Arc::clone(&zeta);
    AuxiliaryFunction::new(
        move |x: T| {
            let z = zeta(x)?;
            let dz = numerics::numeric_derivative(|u| z2(u), x)?;
            if dz == T::zero() {
                return Err(EvalError::ZeroDerivative { x: x.as_f64() });
            }
            finite(-z / dz, x)
        },
        x_star,
        AuxKind::FromZeta,
    )
}

/// `ψ_u = −1 / (ln ζ)′`, using the analytic log-derivative when one is
/// supplied and a central difference of `ln ζ` otherwise. When both exist a
/// relative disagreement above 1e-4 is logged.
pub fn psi_from_log_zeta<T, L, D>(log_zeta: L, dlog_zeta: Option<D>, x_star: T) -> AuxiliaryFunction<T>
where
    T: Scalar,
    L: Fn(T) -> Result<T, EvalError> + Send + Sync + 'static,
    D: Fn(T) -> Result<T, EvalError> + Send + Sync + 'static,
{
    let f = move |x: T| {
        let numeric = || numerics::numeric_derivative(&log_zeta, x);
        let d = match &dlog_zeta {
            Some(d) => {
                let analytic = d(x)?;
                if log::log_enabled!(log::Level::Debug) {
                    if let Ok(n) = numeric() {
                        let rel = ((n - analytic) / analytic).abs();
                        if rel > T::lit(1e-4) {
                            log::debug!("zeta log-derivative mismatch at x={x}: analytic {analytic}, numeric {n}");
                        }
                    }
                }
                analytic
            }
            None => numeric()?,
        };
        if d == T::zero() {
            return Err(EvalError::ZeroDerivative { x: x.as_f64() });
        }
        finite(-T::one() / d, x)
    };
    AuxiliaryFunction::new(f, x_star, AuxKind::FromZeta)
}

/// ζ route for a catalogued distribution (analytic log-derivative).
pub fn psi_zeta_route<T: Scalar>(spec: &DistributionSpec<T>) -> Result<AuxiliaryFunction<T>, CatalogError> {
    if !spec.has_zeta() {
        return Err(CatalogError::NoZeta(spec.id().to_string()));
    }
    let s1 = spec.clone();
    let s2 = spec.clone();
    let aux = psi_from_log_zeta(
        move |x: T| s1.log_zeta(x).ok_or(EvalError::NonFinite { x: x.as_f64() }),
        Some(move |x: T| s2.zeta_log_derivative(x).ok_or(EvalError::NonFinite { x: x.as_f64() })),
        spec.tail_start(),
    );
    Ok(aux.with_label(format!("zeta route for {}", spec.id())))
}

/// Reciprocal hazard `F̄/f`, evaluated as `exp(ln F̄ − ln f)`.
pub fn psi_reciprocal_hazard<T: Scalar>(spec: &DistributionSpec<T>) -> Result<AuxiliaryFunction<T>, CatalogError> {
    if !spec.has_density() {
        return Err(CatalogError::NoDensity(spec.id().to_string()));
    }
    let s = spec.clone();
    let f = move |x: T| {
        let ls = s.log_survival(x);
        let ld = s.log_density(x).unwrap_or(T::neg_infinity());
        if ld == T::neg_infinity() {
            return Err(EvalError::DivisionByZero { x: x.as_f64() });
        }
        finite((ls - ld).exp(), x)
    };
    Ok(AuxiliaryFunction::new(f, spec.tail_start(), AuxKind::ReciprocalHazard)
        .with_label(format!("reciprocal hazard of {}", spec.id())))
}

/// Universal ψ_u from the explicit tail-integral formulas, chosen by the sign of γ.
pub fn psi_integral_universal<T: Scalar>(spec: &DistributionSpec<T>) -> AuxiliaryFunction<T> {
    psi_integral_universal_with(spec, QuadOptions::default())
}

pub fn psi_integral_universal_with<T: Scalar>(spec: &DistributionSpec<T>, opts: QuadOptions<T>) -> AuxiliaryFunction<T> {
    let s = spec.clone();
    let g = spec.gamma();
    let (kind, aux) = if g == T::zero() {
        let f = move |x: T| {
            // I = h·m0, II = h²·m1, III = h³·m2
            let (h, m0) = numerics::scaled_tail_ratio_integral(&s, x, TailMode::Single, opts)?;
            let (_, m1) = numerics::scaled_tail_ratio_integral(&s, x, TailMode::Double, opts)?;
            let (_, m2) = numerics::scaled_tail_ratio_integral(&s, x, TailMode::Triple, opts)?;
            let den = T::lit(3.0) * m0 * m2 - T::lit(2.0) * m1 * m1;
            if den == T::zero() {
                return Err(EvalError::DivisionByZero { x: x.as_f64() });
            }
            finite(h * (m1 * m2 / den), x)
        };
        (AuxKind::IntegralGumbel, AuxiliaryFunction::new(f, spec.tail_start(), AuxKind::IntegralGumbel))
    } else if g > T::zero() {
        let f = move |x: T| finite(x * numerics::frechet_tail_integral(&s, x, opts)?, x);
        (AuxKind::IntegralFrechet, AuxiliaryFunction::new(f, spec.tail_start(), AuxKind::IntegralFrechet))
    } else {
        let f = move |x: T| {
            let d = s.x_e() - x;
            finite(d * numerics::weibull_tail_integral(&s, x, opts)?, x)
        };
        (AuxKind::IntegralWeibull, AuxiliaryFunction::new(f, spec.tail_start(), AuxKind::IntegralWeibull))
    };
    aux.with_label(format!("{} for {}", kind, spec.id()))
}

/// The classic VR-valid forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassicForm {
    MeanExcess,
    DoubleMeanExcess,
    LinearGamma,
}

impl FromStr for ClassicForm {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mean_excess" => Ok(ClassicForm::MeanExcess),
            "double_mean_excess" => Ok(ClassicForm::DoubleMeanExcess),
            "linear_gamma" => Ok(ClassicForm::LinearGamma),
            other => Err(format!("unknown classic form `{other}`")),
        }
    }
}

pub fn psi_classic<T: Scalar>(
    spec: &DistributionSpec<T>,
    form: ClassicForm,
) -> Result<AuxiliaryFunction<T>, CatalogError> {
    let opts = QuadOptions::default();
    let s = spec.clone();
    let start = spec.tail_start();
    let aux = match form {
        ClassicForm::MeanExcess => AuxiliaryFunction::new(
            move |x: T| finite(numerics::tail_ratio_integral(&s, x, TailMode::Single, opts)?, x),
            start,
            AuxKind::MeanExcess,
        ),
        ClassicForm::DoubleMeanExcess => AuxiliaryFunction::new(
            move |x: T| {
                let (h, m0) = numerics::scaled_tail_ratio_integral(&s, x, TailMode::Single, opts)?;
                let (_, m1) = numerics::scaled_tail_ratio_integral(&s, x, TailMode::Double, opts)?;
                if m0 == T::zero() {
                    return Err(EvalError::DivisionByZero { x: x.as_f64() });
                }
                finite(h * (m1 / m0), x)
            },
            start,
            AuxKind::DoubleMeanExcess,
        ),
        ClassicForm::LinearGamma => {
            let g = spec.gamma();
            if g == T::zero() {
                return Err(CatalogError::InvalidParameter {
                    dist: spec.id().to_string(),
                    param: "gamma".into(),
                    value: 0.0,
                    reason: "the linear form needs a non-zero extreme value index".into(),
                });
            }
            if g > T::zero() {
                AuxiliaryFunction::new(move |x: T| Ok(g * x), T::zero().max(start), AuxKind::LinearGamma)
                    .with_source(format!("{}*x", g))
            } else {
                let xe = spec.x_e();
                AuxiliaryFunction::new(move |x: T| Ok(-g * (xe - x)), start, AuxKind::LinearGamma)
                    .with_source(format!("{}*({}-x)", -g, xe))
            }
        }
    };
    let kind = aux.kind();
    Ok(aux.with_label(format!("{} for {}", kind, spec.id())))
}

/// Closed form from the catalog.
pub fn psi_catalog<T: Scalar>(
    spec: &DistributionSpec<T>,
    which: CatalogEntry,
) -> Result<AuxiliaryFunction<T>, CatalogError> {
    spec.catalog_psi(which)
}

/// Construction route for ψ_u.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Catalog,
    Integral,
    Hazard,
    Zeta,
}

impl Route {
    pub fn as_str(self) -> &'static str {
        match self {
            Route::Catalog => "catalog",
            Route::Integral => "integral",
            Route::Hazard => "hazard",
            Route::Zeta => "zeta",
        }
    }
}

impl FromStr for Route {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "catalog" => Ok(Route::Catalog),
            "integral" => Ok(Route::Integral),
            "hazard" => Ok(Route::Hazard),
            "zeta" => Ok(Route::Zeta),
            other => Err(format!("unknown route `{other}` (expected catalog, integral, hazard or zeta)")),
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// ψ_u by the requested route. The catalog route falls back to the integral
/// formulas when the distribution has no closed form.
pub fn universal_psi<T: Scalar>(spec: &DistributionSpec<T>, route: Route) -> Result<AuxiliaryFunction<T>, CatalogError> {
    match route {
        Route::Catalog => match spec.catalog_psi(CatalogEntry::Universal) {
            Ok(p) => Ok(p),
            Err(CatalogError::NoCatalogEntry { .. }) => Ok(psi_integral_universal(spec)),
            Err(e) => Err(e),
        },
        Route::Integral => Ok(psi_integral_universal(spec)),
        Route::Hazard => psi_reciprocal_hazard(spec),
        Route::Zeta => psi_zeta_route(spec),
    }
}

#[inline]
fn finite<T: Scalar>(v: T, x: T) -> Result<T, EvalError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EvalError::NonFinite { x: x.as_f64() })
    }
}
