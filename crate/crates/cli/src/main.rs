//! `geodescent` — generate feasibility instances, run the Riemannian
//! subgradient method, certify recorded bounds, and plot reports.
//!
//! Exit codes: 0 success, 1 certification failure, 2 usage/config error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use geodescent::{ManifoldKind, TheoremId};
use geodescent_cli::commands::{self, CertifyPlan, PlotPlan};
use geodescent_cli::config::{parse_manifold, FileConfig, RuleToken, Settings};
use geodescent_cli::error::{CliError, EXIT_CERTIFICATION_FAILURE};

#[derive(Parser)]
#[command(
    name = "geodescent",
    version,
    about = "Subgradient methods on the sphere and the positive-definite cone, \
             with a posteriori certification of their complexity bounds"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a feasibility instance file
    Generate(GenerateArgs),
    /// Run the subgradient method, writing a trace CSV
    Run(RunArgs),
    /// Re-check a recorded bound on a trace CSV, writing a report CSV
    Certify(CertifyArgs),
    /// Render a report CSV as an SVG line chart
    Plot(PlotArgs),
}

#[derive(Args)]
struct SharedInstanceArgs {
    /// Flat key=value configuration file; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Manifold: `sphere` or `spd`
    #[arg(long, value_parser = parse_manifold)]
    manifold: Option<ManifoldKind>,
    /// Ambient dimension (sphere) or matrix size (spd)
    #[arg(long)]
    n: Option<usize>,
    /// Number of ball centers
    #[arg(long)]
    m: Option<usize>,
    /// Ball radius
    #[arg(long)]
    r: Option<f64>,
    /// Feasibility slack
    #[arg(long)]
    eps: Option<f64>,
    /// RNG seed (ChaCha8, 64-bit)
    #[arg(long)]
    seed: Option<u64>,
    /// Sphere start-distance mixing factor in [0, 1); drawn from the seed
    /// when omitted
    #[arg(long)]
    lambda: Option<f64>,
    /// Output path
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    shared: SharedInstanceArgs,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    shared: SharedInstanceArgs,
    /// Instance file to run on (alternative to generation parameters)
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Step rule: `exogenous` (harmonic 1/(k+1)) or `polyak`
    #[arg(long)]
    rule: Option<RuleToken>,
    /// Polyak gain factor: alpha = factor * tanh(d0)/d0
    #[arg(long)]
    alpha_factor: Option<f64>,
    /// Curvature lower-bound override (spd only, must be <= 0)
    #[arg(long, allow_hyphen_values = true)]
    kappa: Option<f64>,
    /// Iteration cap
    #[arg(long)]
    max_iter: Option<usize>,
}

#[derive(Args)]
struct CertifyArgs {
    /// Trace CSV produced by `run`
    #[arg(long)]
    trace: PathBuf,
    /// Which inequality to re-check: exogenous-complexity,
    /// polyak-complexity, polyak-sum, polyak-decrease,
    /// flat-polyak-decrease, step-inequality, or quasi-fejer
    #[arg(long, value_parser = parse_theorem)]
    theorem: TheoremId,
    /// Curvature lower bound the constants use (<= 0)
    #[arg(long, allow_hyphen_values = true)]
    kappa: f64,
    /// Polyak gain factor the run used (Polyak theorems only)
    #[arg(long, default_value_t = 1.9999)]
    alpha_factor: f64,
    /// Report CSV output path
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PlotArgs {
    /// Report CSV produced by `certify`
    #[arg(long)]
    report: PathBuf,
    /// SVG output path
    #[arg(long)]
    out: PathBuf,
    /// Chart title
    #[arg(long, default_value = "certification report")]
    title: String,
}

fn parse_theorem(s: &str) -> Result<TheoremId, String> {
    TheoremId::from_token(s).ok_or_else(|| {
        format!(
            "unknown theorem `{s}` (expected one of: exogenous-complexity, \
             polyak-complexity, polyak-sum, polyak-decrease, flat-polyak-decrease, \
             step-inequality, quasi-fejer)"
        )
    })
}

impl SharedInstanceArgs {
    fn settings(
        &self,
        rule: Option<RuleToken>,
        alpha_factor: Option<f64>,
        kappa: Option<f64>,
        max_iter: Option<usize>,
    ) -> Result<Settings, CliError> {
        let flags = Settings {
            manifold: self.manifold,
            n: self.n,
            m: self.m,
            r: self.r,
            eps: self.eps,
            seed: self.seed,
            lambda: self.lambda,
            rule,
            alpha_factor,
            kappa,
            max_iter,
            out: self.out.clone(),
        };
        match &self.config {
            None => Ok(flags),
            Some(path) => flags.or_from_file(&FileConfig::load(path)?),
        }
    }
}

fn dispatch(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Cmd::Generate(args) => {
            let settings = args.shared.settings(None, None, None, None)?;
            let plan = commands::resolve_generate(&settings)?;
            let instance = commands::cmd_generate(&plan)?;
            println!(
                "wrote instance to {} (manifold={} n={} m={} seed={})",
                plan.out.display(),
                plan.manifold,
                plan.n,
                instance.centers().len(),
                plan.seed,
            );
            Ok(0)
        }
        Cmd::Run(args) => {
            let settings = args.shared.settings(
                args.rule,
                args.alpha_factor,
                args.kappa,
                args.max_iter,
            )?;
            let plan = commands::resolve_run(&settings, args.instance.as_deref())?;
            let summary = commands::cmd_run(&plan)?;
            println!(
                "run finished: {} after {} steps (final value {:.6e}); trace written to {}",
                summary.termination.token(),
                summary.steps,
                summary.final_value,
                plan.out.display(),
            );
            Ok(0)
        }
        Cmd::Certify(args) => {
            let plan = CertifyPlan {
                trace: args.trace,
                theorem: args.theorem,
                kappa: args.kappa,
                alpha_factor: args.alpha_factor,
                out: args.out,
            };
            let summary = commands::cmd_certify(&plan)?;
            if summary.certified {
                println!(
                    "certified {} over {} rows: min margin {:.6e}; report written to {}",
                    plan.theorem.token(),
                    summary.rows,
                    summary.min_margin,
                    plan.out.display(),
                );
                Ok(0)
            } else {
                let (n, margin) = summary.first_violation.expect("uncertified has a violation");
                eprintln!(
                    "certification failed for {}: first violated N = {n} (margin {margin:.6e}); \
                     report written to {}",
                    plan.theorem.token(),
                    plan.out.display(),
                );
                Ok(EXIT_CERTIFICATION_FAILURE as u8)
            }
        }
        Cmd::Plot(args) => {
            let plan = PlotPlan {
                report: args.report,
                out: args.out,
                title: args.title,
            };
            commands::cmd_plot(&plan)?;
            println!("wrote plot to {}", plan.out.display());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
