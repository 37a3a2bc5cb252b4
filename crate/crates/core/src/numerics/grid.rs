use std::fmt;

use thiserror::Error;

use crate::scalar::Scalar;

pub const MIN_GRID_POINTS: usize = 8;

/// Rule generating the probe points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridRule<T> {
    /// `x_k = x0 · ratio^k` (infinite endpoint).
    Geometric { x0: T, ratio: T, count: usize },
    /// `x_k = exp(e0 · ratio^k)` (infinite endpoint, slowly varying tails).
    LogGeometric { e0: T, ratio: T, count: usize },
    /// `x_k = x_E − d0 · shrink^k` (finite endpoint).
    TowardEndpoint { d0: T, shrink: T, count: usize },
    /// Explicit points.
    Custom,
}

impl<T: Scalar> GridRule<T> {
    pub fn count(&self) -> Option<usize> {
        match *self {
            GridRule::Geometric { count, .. }
            | GridRule::LogGeometric { count, .. }
            | GridRule::TowardEndpoint { count, .. } => Some(count),
            GridRule::Custom => None,
        }
    }

    /// Replaces the start (`x0`, `e0` or `d0`), ratio and count where given.
    pub fn with_overrides(self, start: Option<T>, ratio: Option<T>, count: Option<usize>) -> Self {
        match self {
            GridRule::Geometric { x0, ratio: r, count: c } => GridRule::Geometric {
                x0: start.unwrap_or(x0),
                ratio: ratio.unwrap_or(r),
                count: count.unwrap_or(c),
            },
            GridRule::LogGeometric { e0, ratio: r, count: c } => GridRule::LogGeometric {
                e0: start.unwrap_or(e0),
                ratio: ratio.unwrap_or(r),
                count: count.unwrap_or(c),
            },
            GridRule::TowardEndpoint { d0, shrink, count: c } => GridRule::TowardEndpoint {
                d0: start.unwrap_or(d0),
                shrink: ratio.unwrap_or(shrink),
                count: count.unwrap_or(c),
            },
            GridRule::Custom => GridRule::Custom,
        }
    }
}

impl<T: Scalar> fmt::Display for GridRule<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridRule::Geometric { x0, ratio, count } => write!(f, "geometric(x0={x0}, ratio={ratio}, count={count})"),
            GridRule::LogGeometric { e0, ratio, count } => {
                write!(f, "log-geometric(x=exp(e0*ratio^k), e0={e0}, ratio={ratio}, count={count})")
            }
            GridRule::TowardEndpoint { d0, shrink, count } => {
                write!(f, "toward-endpoint(d0={d0}, shrink={shrink}, count={count})")
            }
            GridRule::Custom => write!(f, "custom"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("a probe grid needs at least {min} points, got {got}")]
    TooFewPoints { got: usize, min: usize },
    #[error("probe points must be strictly increasing (index {index})")]
    NotIncreasing { index: usize },
    #[error("probe point {x} is not below the endpoint {x_e}")]
    BeyondEndpoint { x: f64, x_e: f64 },
    #[error("grid rule is degenerate: {0}")]
    BadRule(String),
}

/// Points approaching the right endpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeGrid<T> {
    x_e: T,
    points: Vec<T>,
    rule: GridRule<T>,
}

impl<T: Scalar> ProbeGrid<T> {
    pub fn new(rule: GridRule<T>, x_e: T) -> Result<Self, GridError> {
        let points: Vec<T> = match rule {
            GridRule::Geometric { x0, ratio, count } => {
                if !(ratio > T::one()) || !(x0 > T::zero()) {
                    return Err(GridError::BadRule("geometric grids need x0 > 0 and ratio > 1".into()));
                }
                (0..count).map(|k| x0 * ratio.powi(k as i32)).collect()
            }
            GridRule::LogGeometric { e0, ratio, count } => {
                if !(ratio > T::one()) || !(e0 > T::zero()) {
                    return Err(GridError::BadRule("log-geometric grids need e0 > 0 and ratio > 1".into()));
                }
                (0..count).map(|k| (e0 * ratio.powi(k as i32)).exp()).collect()
            }
            GridRule::TowardEndpoint { d0, shrink, count } => {
                if !x_e.is_finite() {
                    return Err(GridError::BadRule("toward-endpoint grids need a finite endpoint".into()));
                }
                if !(shrink > T::zero() && shrink < T::one()) || !(d0 > T::zero()) {
                    return Err(GridError::BadRule("toward-endpoint grids need d0 > 0 and 0 < shrink < 1".into()));
                }
                (0..count).map(|k| x_e - d0 * shrink.powi(k as i32)).collect()
            }
            GridRule::Custom => return Err(GridError::BadRule("use ProbeGrid::from_points for explicit points".into())),
        };
        Self::checked(points, x_e, rule)
    }

    /// Grid from explicit points.
    pub fn from_points(points: Vec<T>, x_e: T) -> Result<Self, GridError> {
        Self::checked(points, x_e, GridRule::Custom)
    }

    fn checked(points: Vec<T>, x_e: T, rule: GridRule<T>) -> Result<Self, GridError> {
        if points.len() < MIN_GRID_POINTS {
            return Err(GridError::TooFewPoints { got: points.len(), min: MIN_GRID_POINTS });
        }
        for (i, w) in points.windows(2).enumerate() {
            if !(w[1] > w[0]) {
                return Err(GridError::NotIncreasing { index: i + 1 });
            }
        }
        for &x in &points {
            if !x.is_finite() || x >= x_e {
                return Err(GridError::BeyondEndpoint { x: x.as_f64(), x_e: x_e.as_f64() });
            }
        }
        Ok(ProbeGrid { x_e, points, rule })
    }

    pub fn points(&self) -> &[T] {
        &self.points
    }

    pub fn x_e(&self) -> T {
        self.x_e
    }

    pub fn rule(&self) -> GridRule<T> {
        self.rule
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Points strictly above `x` (the rule is kept for reporting).
    pub fn after(&self, x: T) -> Result<Self, GridError> {
        let points: Vec<T> = self.points.iter().copied().filter(|&p| p > x).collect();
        Self::checked(points, self.x_e, self.rule)
    }
}

impl<T: Scalar> fmt::Display for ProbeGrid<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} toward x_E={} ({} points)", self.rule, self.x_e, self.points.len())
    }
}
