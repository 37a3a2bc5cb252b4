//! Auxiliary functions for the variation representation (VR) and the von
//! Mises representation (vMR) of distributions in a max-domain of attraction.
//!
//! The crate is organised bottom-up:
//!
//! * [`dist_catalog`]: catalogued distributions with log-space tail evaluators.
//! * [`numerics`]: tail quadrature, numeric differentiation, probe grids and
//!   limit detection.
//! * [`psi_expr`]: the expression language for candidate auxiliary functions.
//! * [`universal_aux`]: constructions of universal and classic auxiliary functions.
//! * [`validity`]: the P_γ, VR and vMR decision procedures.
//! * [`limit_probes`]: direct probes of both representations.
//! * [`estimation`]: sampling and the power-form fit `ψ(x) = x^(1-β)/(cβ)`.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases at the crate root fix the scalar to `f64`.

// NaN-aware comparisons are written as `!(a < b)` on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dist_catalog;
pub mod error;
pub mod estimation;
pub mod limit_probes;
pub mod numerics;
pub mod psi_expr;
pub mod scalar;
pub mod special;
pub mod universal_aux;
pub mod validity;

pub use error::{CatalogError, DomainError, EvalError};
pub use scalar::Scalar;

/// A catalogued distribution over `f64`.
pub type Distribution = dist_catalog::DistributionSpec<f64>;
/// An auxiliary function over `f64`.
pub type AuxFn = universal_aux::AuxiliaryFunction<f64>;
/// A probe grid over `f64`.
pub type Grid = numerics::ProbeGrid<f64>;
/// A limit estimate over `f64`.
pub type Limit = numerics::LimitEstimate<f64>;
/// A validity report over `f64`.
pub type Report = validity::ValidityReport<f64>;
/// A power-form fit over `f64`.
pub type Fit = estimation::FitResult<f64>;
