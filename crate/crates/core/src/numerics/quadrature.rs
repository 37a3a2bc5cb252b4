//! Adaptive Gauss–Kronrod (7/15) quadrature with QUADPACK error heuristics.

// Node and weight tables are quoted to 30 digits.
#![allow(clippy::excessive_precision)]

use rayon::prelude::*;
use thiserror::Error;

use crate::error::EvalError;
use crate::scalar::Scalar;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_intervals: usize,
}

impl<T: Scalar> Default for QuadOptions<T> {
    fn default() -> Self {
        QuadOptions {
            rel_tol: T::lit(1e-10).max(T::lit(64.0) * T::epsilon()),
            abs_tol: T::zero(),
            max_intervals: 2000,
        }
    }
}

impl<T: Scalar> QuadOptions<T> {
    pub fn with_rel_tol(mut self, rel_tol: T) -> Self {
        self.rel_tol = rel_tol;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: T,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("quadrature did not reach the requested tolerance (estimate {estimate}, error {error})")]
    NotConverged { estimate: f64, error: f64 },
    #[error(transparent)]
    Integrand(#[from] EvalError),
}

/// Failure inside one panel of a cumulative integral.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("integration over [{a}, {b}] failed: {source}")]
pub struct PanelError {
    pub a: f64,
    pub b: f64,
    pub source: QuadError,
}

struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

fn gk15<T: Scalar, F: FnMut(T) -> Result<T, EvalError>>(f: &mut F, a: T, b: T) -> Result<(T, T), EvalError> {
    let l = T::lit;
    let center = l(0.5) * (a + b);
    let half = l(0.5) * (b - a);
    let fc = f(center)?;
    let mut resg = fc * l(WG[3]);
    let mut resk = fc * l(WGK[7]);
    let mut resabs = resk.abs();
    let mut fv1 = [T::zero(); 7];
    let mut fv2 = [T::zero(); 7];
    for j in 0..7 {
        let dx = half * l(XGK[j]);
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        resk = resk + l(WGK[j]) * (f1 + f2);
        resabs = resabs + l(WGK[j]) * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg = resg + l(WG[j / 2]) * (f1 + f2);
        }
    }
    let reskh = resk * l(0.5);
    let mut resasc = l(WGK[7]) * (fc - reskh).abs();
    for j in 0..7 {
        resasc = resasc + l(WGK[j]) * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }
    let result = resk * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut err = ((resk - resg) * half).abs();
    if resasc != T::zero() && err != T::zero() {
        err = resasc * T::one().min((l(200.0) * err / resasc).powf(l(1.5)));
    }
    let floor = l(50.0) * T::epsilon() * resabs;
    if resabs > T::min_positive_value() / (l(50.0) * T::epsilon()) {
        err = err.max(floor);
    }
    if !result.is_finite() || !err.is_finite() {
        return Err(EvalError::NonFinite { x: center.as_f64() });
    }
    Ok((result, err))
}

/// `∫_a^b f` by globally adaptive bisection of the worst segment.
pub fn integrate<T, F>(mut f: F, a: T, b: T, opts: QuadOptions<T>) -> Result<QuadResult<T>, QuadError>
where
    T: Scalar,
    F: FnMut(T) -> Result<T, EvalError>,
{
    if a == b {
        return Ok(QuadResult { value: T::zero(), error: T::zero(), evaluations: 0 });
    }
    let (v, e) = gk15(&mut f, a, b)?;
    let mut segs = vec![Segment { a, b, value: v, error: e }];
    let mut evaluations = 15;
    loop {
        let total: T = segs.iter().map(|s| s.value).sum();
        let err: T = segs.iter().map(|s| s.error).sum();
        if err <= opts.abs_tol.max(opts.rel_tol * total.abs()) {
            return Ok(QuadResult { value: total, error: err, evaluations });
        }
        let not_converged = QuadError::NotConverged { estimate: total.as_f64(), error: err.as_f64() };
        if segs.len() >= opts.max_intervals {
            return Err(not_converged);
        }
        let worst = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.partial_cmp(&y.1.error).unwrap_or(std::cmp::Ordering::Equal))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let Segment { a: sa, b: sb, .. } = segs[worst];
        let mid = T::lit(0.5) * (sa + sb);
        if !(mid > sa.min(sb) && mid < sa.max(sb)) {
            return Err(not_converged);
        }
        let (v1, e1) = gk15(&mut f, sa, mid)?;
        let (v2, e2) = gk15(&mut f, mid, sb)?;
        evaluations += 30;
        segs[worst] = Segment { a: sa, b: mid, value: v1, error: e1 };
        segs.push(Segment { a: mid, b: sb, value: v2, error: e2 });
    }
}

/// `∫_a^∞ f` through `x = a + h·s/(1−s)`, `s ∈ [0, 1)`; `h` should be the
/// length scale on which `f` decays.
pub fn integrate_semi_infinite<T, F>(mut f: F, a: T, h: T, opts: QuadOptions<T>) -> Result<QuadResult<T>, QuadError>
where
    T: Scalar,
    F: FnMut(T) -> Result<T, EvalError>,
{
    let one = T::one();
    integrate(
        |s: T| {
            let w = one - s;
            let t = h * s / w;
            let v = f(a + t)?;
            if v == T::zero() {
                return Ok(T::zero());
            }
            Ok(v * h / (w * w))
        },
        T::zero(),
        one,
        opts,
    )
}

/// Running integral of `f` from `start` to each of `points` (all of which
/// must exceed `start`). Panels are integrated independently in logarithmic
/// coordinates (`ln v` for an infinite endpoint, `ln(x_E − v)` for a finite
/// one) and summed in grid order.
pub fn cumulative_integral<T, F>(
    f: &F,
    start: T,
    points: &[T],
    x_e: T,
    opts: QuadOptions<T>,
) -> Result<Vec<T>, PanelError>
where
    T: Scalar,
    F: Fn(T) -> Result<T, EvalError> + Sync,
{
    let bounds: Vec<(T, T)> = std::iter::once(start)
        .chain(points.iter().copied())
        .collect::<Vec<_>>()
        .windows(2)
        .map(|w| (w[0], w[1]))
        .collect();
    let panels: Vec<Result<T, PanelError>> = bounds
        .par_iter()
        .map(|&(a, b)| {
            panel_integral(f, a, b, x_e, opts)
                .map(|r| r.value)
                .map_err(|source| PanelError { a: a.as_f64(), b: b.as_f64(), source })
        })
        .collect();
    let mut acc = T::zero();
    let mut out = Vec::with_capacity(panels.len());
    for p in panels {
        acc = acc + p?;
        out.push(acc);
    }
    Ok(out)
}

fn panel_integral<T, F>(f: &F, a: T, b: T, x_e: T, opts: QuadOptions<T>) -> Result<QuadResult<T>, QuadError>
where
    T: Scalar,
    F: Fn(T) -> Result<T, EvalError>,
{
    if x_e.is_finite() {
        let (sa, sb) = ((x_e - a).ln(), (x_e - b).ln());
        let r = integrate(
            |s: T| {
                let d = s.exp();
                Ok(f(x_e - d)? * d)
            },
            sb,
            sa,
            opts,
        )?;
        Ok(r)
    } else if a > T::zero() {
        integrate(
            |s: T| {
                let v = s.exp();
                Ok(f(v)? * v)
            },
            a.ln(),
            b.ln(),
            opts,
        )
    } else {
        integrate(f, a, b, opts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomials_are_exact() {
        // the Kronrod rule integrates degree 22 exactly
        for deg in 0..=22 {
            let r = integrate(|x: f64| Ok(x.powi(deg)), 0.0, 1.0, QuadOptions::default()).unwrap();
            assert_relative_eq!(r.value, 1.0 / (deg as f64 + 1.0), max_relative = 1e-13);
        }
    }

    #[test]
    fn smooth_and_peaked_integrands() {
        let r = integrate(|x: f64| Ok(x.sin()), 0.0, std::f64::consts::PI, QuadOptions::default()).unwrap();
        assert_relative_eq!(r.value, 2.0, max_relative = 1e-12);
        let r = integrate(|x: f64| Ok(1.0 / (1e-4 + x * x)), -1.0, 1.0, QuadOptions::default()).unwrap();
        assert_relative_eq!(r.value, 2.0 * 100.0 * (100.0_f64).atan(), max_relative = 1e-10);
        let r = integrate(|x: f64| Ok(x.sqrt()), 0.0, 1.0, QuadOptions::default()).unwrap();
        assert_relative_eq!(r.value, 2.0 / 3.0, max_relative = 1e-10);
    }

    #[test]
    fn semi_infinite_tails() {
        let r = integrate_semi_infinite(|x: f64| Ok((-2.0 * x).exp()), 5.0, 0.5, QuadOptions::default()).unwrap();
        assert_relative_eq!(r.value, (-10.0_f64).exp() / 2.0, max_relative = 1e-10);
        let r = integrate_semi_infinite(|x: f64| Ok(x.powi(-3)), 10.0, 10.0, QuadOptions::default()).unwrap();
        assert_relative_eq!(r.value, 0.005, max_relative = 1e-10);
    }

    #[test]
    fn failures_are_reported() {
        let r = integrate(|x: f64| if x > 0.5 { Err(EvalError::LogDomain { x }) } else { Ok(1.0) }, 0.0, 1.0, QuadOptions::default());
        assert!(matches!(r, Err(QuadError::Integrand(EvalError::LogDomain { .. }))));
        let opts = QuadOptions { max_intervals: 10, ..QuadOptions::default() };
        let r = integrate(|x: f64| Ok(1.0 / x), 0.0, 1.0, opts);
        assert!(matches!(r, Err(QuadError::NotConverged { .. }) | Err(QuadError::Integrand(_))));
    }

    #[test]
    fn cumulative_panels() {
        let pts: Vec<f64> = (1..=10).map(|k| 2.0 * 1.5f64.powi(k)).collect();
        let k = cumulative_integral(&|v: f64| Ok(-1.0 / v), 2.0, &pts, f64::INFINITY, QuadOptions::default()).unwrap();
        for (x, kv) in pts.iter().zip(&k) {
            assert_relative_eq!(*kv, -(x / 2.0).ln(), max_relative = 1e-12);
        }
        let pts: Vec<f64> = (1..=10).map(|k| 1.0 - 0.5f64.powi(k)).collect();
        let k = cumulative_integral(&|v: f64| Ok(1.0 / (1.0 - v)), 0.0, &pts, 1.0, QuadOptions::default()).unwrap();
        for (x, kv) in pts.iter().zip(&k) {
            assert_relative_eq!(*kv, -(1.0 - x).ln(), max_relative = 1e-12);
        }
        let err = cumulative_integral(
            &|v: f64| if v > 5.0 { Err(EvalError::DivisionByZero { x: v }) } else { Ok(1.0) },
            2.0,
            &[3.0, 4.0, 6.0],
            f64::INFINITY,
            QuadOptions::default(),
        )
        .unwrap_err();
        assert_eq!((err.a, err.b), (4.0, 6.0));
    }
}
