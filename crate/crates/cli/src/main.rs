mod commands;
mod report;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Auxiliary functions for max-domain-of-attraction distributions.
///
/// Exit codes: 0 success / vMR-valid / pass, 3 VR-only, 4 invalid / fail,
/// 5 inconclusive, 2 usage or parse error, 1 runtime error.
#[derive(Debug, Parser)]
#[command(name = "mda-aux", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the distribution catalog.
    List,
    /// Classify a candidate ψ: P_γ, VR-validity and vMR-validity.
    Validate,
    /// Tabulate the ψ_u construction routes (and --psi, if given) on the grid.
    PsiEval,
    /// Probe F̄(x + zψ(x))/F̄(x) against the generalised Pareto tail.
    VrLimit,
    /// Reconstruct c(x) = F̄(x)·exp(∫ 1/ψ) along the grid.
    ReconstructC,
    /// Check the von Mises condition F̄·F″/F′² → −1.
    VonMises,
    /// Sample and fit ψ(x) = x^(1−β)/(cβ) to the empirical mean excess.
    Estimate,
    /// Read the extreme value index off ψ.
    Gamma,
    /// Validate every catalog candidate on the canonical distributions.
    Corpus,
}

#[derive(Debug, Clone, Args)]
pub struct Opts {
    /// Distribution spec, `name(:key=value(,key=value)*)?`.
    #[arg(long, global = true)]
    pub dist: Option<String>,
    /// Candidate auxiliary function, e.g. `x/(1+x^2)`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub psi: Option<String>,
    /// Parameter bindings for --psi, `k=v,...` (distribution parameters are bound too).
    #[arg(long = "psi-params", global = true)]
    pub psi_params: Option<String>,
    /// Construction route for ψ_u.
    #[arg(long, global = true, default_value = "catalog")]
    pub route: String,
    /// Shift in the VR ratio, or lower limit of the K integral for `validate`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub z: Option<f64>,
    /// Domain start of --psi, or lower integration limit for `reconstruct-c`.
    #[arg(long = "x-star", global = true, allow_hyphen_values = true)]
    pub x_star: Option<f64>,
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = 100_000)]
    pub n: usize,
    /// Emit a single JSON document.
    #[arg(long, global = true, conflicts_with = "csv")]
    pub json: bool,
    /// Emit the trails as CSV blocks.
    #[arg(long, global = true)]
    pub csv: bool,
    /// Relative tolerance of the limit verdicts.
    #[arg(long, global = true, default_value_t = 1e-2)]
    pub tol: f64,
    /// Grid start (x0, e0 or d0 depending on the rule).
    #[arg(long = "grid-start", global = true)]
    pub grid_start: Option<f64>,
    /// Grid ratio (or shrink factor toward a finite endpoint).
    #[arg(long = "grid-ratio", global = true)]
    pub grid_ratio: Option<f64>,
    #[arg(long = "grid-count", global = true)]
    pub grid_count: Option<usize>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match commands::run(&cli.command, &cli.opts) {
        Ok(report) => {
            let text = if cli.opts.json {
                report.to_json()
            } else if cli.opts.csv {
                report.to_csv()
            } else {
                report.to_text()
            };
            println!("{}", text.trim_end());
            ExitCode::from(report.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
