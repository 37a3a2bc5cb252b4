//! Sweep over the canonical distributions and a fixed set of candidate
//! auxiliary functions per distribution.

use rayon::prelude::*;

use crate::dist_catalog::{CatalogEntry, DistributionSpec};
use crate::error::CatalogError;
use crate::scalar::Scalar;
use crate::universal_aux::{psi_classic, AuxiliaryFunction, ClassicForm};

use super::{validate, Classification, ValidateOptions, ValidityError, ValidityReport};

/// Spec strings of the canonical distributions.
pub const CORPUS_DISTRIBUTIONS: &[&str] = &[
    "gaussian",
    "lognormal",
    "exponential_like:lambda=1",
    "gamma:alpha=2,beta=1",
    "weibull_like:alpha=1,beta=1,tau=2",
    "loggamma:alpha=2,beta=3",
    "cauchy",
    "pareto_like:alpha=2",
    "beta:p=2,q=2",
    "pareto_like_finite:alpha=2,x_e=1",
    "gev:gamma=0",
    "gev:gamma=0.5",
    "gev:gamma=-0.5",
];

/// One (distribution, candidate) outcome.
#[derive(Debug, Clone)]
pub struct CorpusEntry<T> {
    pub dist: String,
    pub candidate: String,
    pub outcome: Result<ValidityReport<T>, ValidityError>,
}

impl<T: Scalar> CorpusEntry<T> {
    pub fn classification(&self) -> Option<Classification> {
        self.outcome.as_ref().ok().map(|r| r.classification())
    }

    pub fn is_consistency_violation(&self) -> bool {
        matches!(self.outcome, Err(ValidityError::ConsistencyViolation { .. }))
    }
}

pub type Candidate<T> = (String, AuxiliaryFunction<T>);

/// Candidates for one distribution: ψ_u, the simple catalog ψ, the classic
/// forms that apply, `2ψ_u`, `ψ_u/2` and `ψ_u(1 + d)` with `d → 0`
/// (`d = 1/x` for an infinite endpoint, `d = x_E − x` otherwise).
pub fn candidates<T: Scalar>(
    spec: &DistributionSpec<T>,
) -> Result<(AuxiliaryFunction<T>, Vec<Candidate<T>>), CatalogError> {
    let psi_u = spec.catalog_psi(CatalogEntry::Universal)?;
    let mut out = vec![
        ("psi_u".to_string(), psi_u.clone()),
        ("psi".to_string(), spec.catalog_psi(CatalogEntry::VrSimple)?),
    ];
    let forms: &[ClassicForm] = if spec.gamma() == T::zero() {
        &[ClassicForm::MeanExcess, ClassicForm::DoubleMeanExcess]
    } else {
        &[ClassicForm::LinearGamma]
    };
    for &form in forms {
        let name = match form {
            ClassicForm::MeanExcess => "mean_excess",
            ClassicForm::DoubleMeanExcess => "double_mean_excess",
            ClassicForm::LinearGamma => "linear_gamma",
        };
        out.push((name.to_string(), psi_classic(spec, form)?));
    }
    out.push(("2*psi_u".to_string(), psi_u.scaled(T::lit(2.0))));
    out.push(("0.5*psi_u".to_string(), psi_u.scaled(T::lit(0.5))));
    let x_e = spec.x_e();
    let perturbed = if x_e.is_finite() {
        psi_u.perturbed(move |x: T| x_e - x, "psi_u*(1+(x_e-x))")
    } else {
        psi_u.perturbed(|x: T| T::one() / x, "psi_u*(1+1/x)")
    };
    out.push((perturbed.describe(), perturbed));
    Ok((psi_u, out))
}

/// Runs [`validate`] on every (distribution, candidate) pair in parallel.
pub fn run_corpus<T: Scalar>(tol: T) -> Result<Vec<CorpusEntry<T>>, CatalogError> {
    let mut jobs = Vec::new();
    for s in CORPUS_DISTRIBUTIONS {
        let spec = DistributionSpec::<T>::from_spec_str(s)?;
        let (psi_u, cands) = candidates(&spec)?;
        for (name, psi) in cands {
            jobs.push((spec.clone(), psi_u.clone(), name, psi));
        }
    }
    let opts = ValidateOptions { tol, ..ValidateOptions::default() };
    Ok(jobs
        .into_par_iter()
        .map(|(spec, psi_u, name, psi)| CorpusEntry {
            dist: spec.to_string(),
            candidate: name,
            outcome: validate(&spec, &psi, &psi_u, &opts),
        })
        .collect())
}
