use std::collections::BTreeMap;
use std::fmt;

use mda_aux::dist_catalog::{parse_spec_string, CATALOG};
use mda_aux::estimation::{default_threshold_grid, fit_power_psi, sample};
use mda_aux::limit_probes::{reconstruct_c_with_tol, vr_limit_probe_with_tol, CVerdict};
use mda_aux::numerics::{LimitEstimate, ProbeGrid};
use mda_aux::psi_expr::parse_psi;
use mda_aux::universal_aux::{universal_psi, Route};
use mda_aux::validity::corpus::run_corpus;
use mda_aux::validity::{
    check_von_mises_condition, estimate_gamma_from_psi, validate, Check, Trail, ValidateOptions, ValidityError,
};
use mda_aux::{AuxFn, Distribution, Grid};
use serde_json::Value;

use crate::report::{num, Report};
use crate::{Command, Opts};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or unparseable input (exit 2).
    Usage(String),
    /// Failure while computing (exit 1).
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => f.write_str(m),
        }
    }
}

fn usage(e: impl fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn runtime(e: impl fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

fn check_code(c: Check) -> i32 {
    match c {
        Check::Pass => 0,
        Check::Fail => 4,
        Check::Inconclusive => 5,
    }
}

pub fn run(cmd: &Command, opts: &Opts) -> Result<Report, CliError> {
    match cmd {
        Command::List => Ok(cmd_list()),
        Command::Validate => cmd_validate(opts),
        Command::PsiEval => cmd_psi_eval(opts),
        Command::VrLimit => cmd_vr_limit(opts),
        Command::ReconstructC => cmd_reconstruct_c(opts),
        Command::VonMises => cmd_von_mises(opts),
        Command::Estimate => cmd_estimate(opts),
        Command::Gamma => cmd_gamma(opts),
        Command::Corpus => cmd_corpus(opts),
    }
}

/// Resolved inputs shared by the distribution-based commands.
struct Setup {
    spec: Distribution,
    grid: Grid,
    psi_u: AuxFn,
    route: Route,
}

fn setup(opts: &Opts, report: &mut Report) -> Result<Setup, CliError> {
    let dist = opts.dist.as_deref().ok_or_else(|| usage("--dist is required"))?;
    let spec = Distribution::from_spec_str(dist).map_err(usage)?;
    let route: Route = opts.route.parse().map_err(usage)?;
    if !(opts.tol > 0.0 && opts.tol < 1.0) {
        return Err(usage("--tol must lie in (0, 1)"));
    }
    let rule = spec.default_grid_rule().with_overrides(opts.grid_start, opts.grid_ratio, opts.grid_count);
    let grid = ProbeGrid::new(rule, spec.x_e()).map_err(|e| usage(format!("grid: {e}")))?;
    let psi_u = universal_psi(&spec, route).map_err(usage)?;
    report.input("dist", spec.to_string());
    report.input("route", route.as_str());
    report.input("tol", num(opts.tol));
    report.input("grid", rule.to_string());
    report.grid("probe", rule.to_string(), grid.x_e(), grid.points());
    report.text_value("psi_u", psi_u.describe());
    Ok(Setup { spec, grid, psi_u, route })
}

/// The user's --psi bound to the distribution parameters and --psi-params.
fn user_psi(opts: &Opts, s: &Setup, report: &mut Report) -> Result<Option<AuxFn>, CliError> {
    let Some(src) = opts.psi.as_deref() else {
        return Ok(None);
    };
    let expr = parse_psi(src).map_err(|e| usage(format!("--psi: {e}")))?;
    let mut bindings: BTreeMap<String, f64> = s.spec.params().clone();
    if s.spec.x_e().is_finite() {
        bindings.insert("x_e".into(), s.spec.x_e());
    }
    if let Some(p) = opts.psi_params.as_deref() {
        let (_, extra) = parse_spec_string(&format!("psi:{p}")).map_err(|e| usage(format!("--psi-params: {e}")))?;
        bindings.extend(extra);
    }
    let x_star = opts.x_star.unwrap_or(s.psi_u.x_star());
    let aux = expr.to_auxiliary(&bindings, x_star).map_err(|e| usage(format!("--psi: {e}")))?;
    report.input("psi", src);
    if let Some(p) = &opts.psi_params {
        report.input("psi_params", p.as_str());
    }
    report.input("x_star", num(x_star));
    Ok(Some(aux))
}

fn push_trail(report: &mut Report, label: &str, trail: &Trail<f64>) {
    report.trail(label, &trail.points, trail.values());
    if let Some(e) = &trail.failure {
        report.text_value(&format!("{label} failure"), e.to_string());
    }
}

fn push_estimate(report: &mut Report, label: &str, x: &[f64], est: &LimitEstimate<f64>) {
    report.trail(label, x, &est.values);
    report.verdict(&format!("{label} limit"), est.verdict.to_string());
}

fn cmd_list() -> Report {
    let mut r = Report::new("list");
    for row in CATALOG {
        let params = if row.params.is_empty() { String::new() } else { format!(" {}", row.params.join(",")) };
        r.verdict(
            &format!("{}{}", row.id, params),
            format!("gamma={} x_e={} psi_u={} psi={}", row.gamma, row.x_e, row.psi_u, row.psi),
        );
    }
    r.values.insert("rows".into(), CATALOG.len().into());
    r
}

fn cmd_validate(opts: &Opts) -> Result<Report, CliError> {
    let mut r = Report::new("validate");
    let s = setup(opts, &mut r)?;
    let psi = user_psi(opts, &s, &mut r)?.ok_or_else(|| usage("--psi is required"))?;
    if let Some(z) = opts.z {
        r.input("z", num(z));
    }
    let vopts = ValidateOptions { tol: opts.tol, grid: Some(s.grid.clone()), z: opts.z };
    let rep = match validate(&s.spec, &psi, &s.psi_u, &vopts) {
        Ok(rep) => rep,
        Err(e @ ValidityError::ConsistencyViolation { .. }) => return Err(runtime(e)),
        Err(e) => return Err(usage(e)),
    };
    r.grid("validated", rep.grid.rule().to_string(), rep.grid.x_e(), rep.grid.points());
    push_trail(&mut r, &format!("p_gamma {}", rep.p_gamma.quantity), &rep.p_gamma.trail);
    push_trail(&mut r, "vr psi/psi_u", &rep.vr.trail);
    if let Some(k) = &rep.vmr.k_trail {
        push_trail(&mut r, "vmr K(x)", k);
    }
    r.value("gamma", rep.p_gamma.gamma);
    r.value("z", rep.vmr.z);
    if let Some(k) = rep.k_z {
        r.value("k_z", k);
    }
    r.verdict("p_gamma", format!("{} ({})", rep.p_gamma.verdict, rep.p_gamma.trail.estimate.verdict));
    r.verdict("vr", format!("{} ({})", rep.vr.verdict, rep.vr.trail.estimate.verdict));
    let reason = rep.vmr.reason.as_ref().map(|x| format!(" ({x})")).unwrap_or_default();
    r.verdict("vmr", format!("{}{reason}", rep.vmr.verdict));
    let class = rep.classification();
    r.verdict("classification", class.as_str());
    r.exit_code = class.exit_code();
    Ok(r)
}

fn cmd_psi_eval(opts: &Opts) -> Result<Report, CliError> {
    let mut r = Report::new("psi-eval");
    let s = setup(opts, &mut r)?;
    let x = s.grid.points();
    let mut table: Vec<(String, AuxFn)> = Vec::new();
    for route in [Route::Catalog, Route::Integral, Route::Hazard, Route::Zeta] {
        match universal_psi(&s.spec, route) {
            Ok(p) => table.push((format!("psi_u [{route}]"), p)),
            Err(e) => r.verdict(&format!("route {route}"), format!("unavailable: {e}")),
        }
    }
    if let Some(p) = user_psi(opts, &s, &mut r)? {
        table.push(("psi".to_string(), p));
    }
    for (label, p) in table {
        let values: Vec<f64> = x.iter().map(|&v| p.eval(v).unwrap_or(f64::NAN)).collect();
        r.trail(&label, x, &values);
    }
    Ok(r)
}

fn probe_psi(opts: &Opts, s: &Setup, r: &mut Report) -> Result<AuxFn, CliError> {
    Ok(match user_psi(opts, s, r)? {
        Some(p) => p,
        None => {
            r.input("psi", format!("psi_u [{}]", s.route));
            s.psi_u.clone()
        }
    })
}

fn cmd_vr_limit(opts: &Opts) -> Result<Report, CliError> {
    let mut r = Report::new("vr-limit");
    let s = setup(opts, &mut r)?;
    let psi = probe_psi(opts, &s, &mut r)?;
    let z = opts.z.unwrap_or(1.0);
    r.input("z", num(z));
    let p = vr_limit_probe_with_tol(&s.spec, &psi, z, &s.grid, opts.tol).map_err(usage)?;
    push_estimate(&mut r, "F(x+z psi(x))/F(x)", &p.points, &p.estimate);
    r.value("target", p.target);
    r.verdict("vr_limit", p.verdict.to_string());
    r.exit_code = check_code(p.verdict);
    Ok(r)
}

fn cmd_reconstruct_c(opts: &Opts) -> Result<Report, CliError> {
    let mut r = Report::new("reconstruct-c");
    let s = setup(opts, &mut r)?;
    let psi = probe_psi(opts, &s, &mut r)?;
    let x_star = opts.x_star.unwrap_or(s.grid.after(psi.x_star()).map_err(usage)?.points()[0]);
    r.input("c_lower_limit", num(x_star));
    let c = reconstruct_c_with_tol(&s.spec, &psi, x_star, &s.grid, opts.tol).map_err(runtime)?;
    push_estimate(&mut r, "ln c(x)", &c.points, &c.log_estimate);
    if let CVerdict::Converged(v) = c.verdict {
        r.value("c", v);
    }
    r.verdict("c", c.verdict.name());
    r.exit_code = match c.verdict {
        CVerdict::Converged(_) => 0,
        CVerdict::DivergedToZero | CVerdict::DivergedToInfinity => 4,
        _ => 5,
    };
    Ok(r)
}

fn cmd_von_mises(opts: &Opts) -> Result<Report, CliError> {
    let mut r = Report::new("von-mises");
    let s = setup(opts, &mut r)?;
    let v = check_von_mises_condition(&s.spec, &s.grid, opts.tol).map_err(usage)?;
    push_trail(&mut r, "survival*f'/f^2", &v.trail);
    r.verdict("ratio limit", v.trail.estimate.verdict.to_string());
    r.verdict("von_mises", v.verdict.to_string());
    r.exit_code = check_code(v.verdict);
    Ok(r)
}

fn cmd_estimate(opts: &Opts) -> Result<Report, CliError> {
    let mut r = Report::new("estimate");
    let dist = opts.dist.as_deref().ok_or_else(|| usage("--dist is required"))?;
    let spec = Distribution::from_spec_str(dist).map_err(usage)?;
    if opts.n == 0 {
        return Err(usage("--n must be positive"));
    }
    r.input("dist", spec.to_string());
    r.input("n", opts.n);
    r.input("seed", opts.seed);
    let samples = sample(&spec, opts.n, opts.seed).map_err(runtime)?;
    let thresholds = match (opts.grid_start, opts.grid_ratio, opts.grid_count) {
        (None, None, None) => default_threshold_grid(&samples.values),
        (Some(x0), Some(ratio), Some(count)) => (0..count).map(|k| x0 * ratio.powi(k as i32)).collect(),
        _ => return Err(usage("thresholds need all of --grid-start, --grid-ratio and --grid-count")),
    };
    r.grid("thresholds", "mean-excess thresholds".into(), f64::INFINITY, &thresholds);
    let fit = fit_power_psi(&samples, &thresholds).map_err(runtime)?;
    let (lx, ly): (Vec<f64>, Vec<f64>) = fit.log_log_points.iter().copied().unzip();
    r.trail("ln mean excess vs ln u", &lx, &ly);
    r.value("beta_hat", fit.beta_hat);
    r.value("c_hat", fit.c_hat);
    r.value("slope", fit.slope);
    r.value("intercept", fit.intercept);
    r.value("residual_rms", fit.residual_rms);
    r.text_value("psi_hat", format!("x^({})/({})", 1.0 - fit.beta_hat, fit.c_hat * fit.beta_hat));
    if !fit.dropped.is_empty() {
        r.values.insert("dropped_thresholds".into(), Value::Array(fit.dropped.iter().map(|&u| num(u)).collect()));
    }
    Ok(r)
}

fn cmd_gamma(opts: &Opts) -> Result<Report, CliError> {
    let mut r = Report::new("gamma");
    let s = setup(opts, &mut r)?;
    let psi = probe_psi(opts, &s, &mut r)?;
    let grid = s.grid.after(psi.x_star()).map_err(usage)?;
    r.value("catalog_gamma", s.spec.gamma());
    match estimate_gamma_from_psi(&psi, &grid, opts.tol) {
        Ok(g) => {
            push_trail(&mut r, "ratio", &g.trail);
            r.value("gamma_hat", g.gamma);
            r.verdict("gamma", "converged");
        }
        Err(e) => {
            r.verdict("gamma", e.to_string());
            r.exit_code = 5;
        }
    }
    Ok(r)
}

fn cmd_corpus(opts: &Opts) -> Result<Report, CliError> {
    let mut r = Report::new("corpus");
    r.input("tol", num(opts.tol));
    let entries = run_corpus::<f64>(opts.tol).map_err(runtime)?;
    let mut violations = 0;
    for e in &entries {
        let text = match &e.outcome {
            Ok(rep) => format!(
                "p_gamma={} vr={} vmr={} -> {}",
                rep.p_gamma.verdict,
                rep.vr.verdict,
                rep.vmr.verdict,
                rep.classification()
            ),
            Err(err) => {
                if e.is_consistency_violation() {
                    violations += 1;
                }
                format!("error: {err}")
            }
        };
        r.verdict(&format!("{} / {}", e.dist, e.candidate), text);
    }
    r.value("entries", entries.len() as f64);
    r.value("consistency_violations", violations as f64);
    r.exit_code = if violations == 0 { 0 } else { 1 };
    Ok(r)
}
