use thiserror::Error;

/// Point-wise failure while evaluating an auxiliary function or one of its
/// ingredients. Carries the abscissa so grid sweeps can report it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero at x = {x}")]
    DivisionByZero { x: f64 },
    #[error("logarithm of a non-positive argument at x = {x}")]
    LogDomain { x: f64 },
    #[error("square root of a negative argument at x = {x}")]
    SqrtDomain { x: f64 },
    #[error("non-finite value at x = {x}")]
    NonFinite { x: f64 },
    #[error("derivative of zeta vanishes at x = {x}")]
    ZeroDerivative { x: f64 },
    #[error("x = {x} is outside the evaluation domain ({reason})")]
    OutsideDomain { x: f64, reason: String },
    #[error("tail quadrature did not converge at x = {x} (partial estimate {partial}, error {error})")]
    Quadrature { x: f64, partial: f64, error: f64 },
}

impl EvalError {
    /// Abscissa at which the evaluation failed.
    pub fn x(&self) -> f64 {
        match self {
            EvalError::DivisionByZero { x }
            | EvalError::LogDomain { x }
            | EvalError::SqrtDomain { x }
            | EvalError::NonFinite { x }
            | EvalError::ZeroDerivative { x }
            | EvalError::OutsideDomain { x, .. }
            | EvalError::Quadrature { x, .. } => *x,
        }
    }
}

/// Errors raised while building or querying a catalogued distribution.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CatalogError {
    #[error("unknown distribution id `{0}`")]
    UnknownDistribution(String),
    #[error("distribution `{dist}` requires parameter `{param}`")]
    MissingParameter { dist: String, param: String },
    #[error("invalid value {value} for parameter `{param}` of `{dist}`: {reason}")]
    InvalidParameter { dist: String, param: String, value: f64, reason: String },
    #[error("distribution `{dist}` does not accept parameter `{param}`")]
    UnexpectedParameter { dist: String, param: String },
    #[error("malformed distribution spec `{input}`: {reason}")]
    SpecString { input: String, reason: String },
    #[error("distribution `{0}` has no registered asymptotic equivalent zeta")]
    NoZeta(String),
    #[error("distribution `{0}` has no density")]
    NoDensity(String),
    #[error("distribution `{dist}` has no catalog entry `{which}`")]
    NoCatalogEntry { dist: String, which: String },
}

/// Where a requested abscissa falls relative to the support.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("x = {x} is at or beyond the right endpoint {x_e}")]
    BeyondEndpoint { x: f64, x_e: f64 },
    #[error("x = {x} is at or below the lower support bound {support_lo}")]
    BelowSupport { x: f64, support_lo: f64 },
}
