//! The four subcommands as library functions: resolve settings into a plan,
//! execute the plan, return a summary for the caller to print.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use geodescent::bounds::tanh_ratio;
use geodescent::solver::HARMONIC_SIGMA;
use geodescent::{
    feasibility, solver, CurvatureConstants, FeasibilityInstance, ManifoldHandle, ManifoldKind,
    RuleKind, SolverConfig, StepSizeRule, StopMode, Termination, TheoremId,
};

use crate::config::{require, RuleToken, Settings};
use crate::csvio;
use crate::error::{CliError, Result};
use crate::instancefile;
use crate::svg;

/// Reference experiment defaults per manifold (problem size, ball radius,
/// slack).
fn instance_defaults(kind: ManifoldKind) -> (usize, usize, f64, f64) {
    match kind {
        ManifoldKind::Spd => (10, 10, 1.0, 0.1),
        ManifoldKind::Sphere => (200, 50, PI / 16.0, 1e-3),
    }
}

#[derive(Clone, Debug)]
pub struct GeneratePlan {
    pub manifold: ManifoldKind,
    pub n: usize,
    pub m: usize,
    pub r: f64,
    pub eps: f64,
    pub seed: u64,
    pub lambda: Option<f64>,
    pub out: PathBuf,
}

/// Generation parameters with all defaults applied.
struct InstanceParams {
    manifold: ManifoldKind,
    n: usize,
    m: usize,
    r: f64,
    eps: f64,
    seed: u64,
    lambda: Option<f64>,
}

fn resolve_instance_settings(settings: &Settings) -> Result<InstanceParams> {
    let manifold = require(settings.manifold, "manifold")?;
    let (dn, dm, dr, deps) = instance_defaults(manifold);
    if settings.lambda.is_some() && manifold == ManifoldKind::Spd {
        return Err(CliError::usage(
            "`lambda` applies only to sphere instances",
        ));
    }
    Ok(InstanceParams {
        manifold,
        n: settings.n.unwrap_or(dn),
        m: settings.m.unwrap_or(dm),
        r: settings.r.unwrap_or(dr),
        eps: settings.eps.unwrap_or(deps),
        seed: settings.seed.unwrap_or(0),
        lambda: settings.lambda,
    })
}

pub fn resolve_generate(settings: &Settings) -> Result<GeneratePlan> {
    let p = resolve_instance_settings(settings)?;
    let out = require(settings.out.clone(), "out")?;
    Ok(GeneratePlan {
        manifold: p.manifold,
        n: p.n,
        m: p.m,
        r: p.r,
        eps: p.eps,
        seed: p.seed,
        lambda: p.lambda,
        out,
    })
}

fn build_instance(p: &InstanceParams) -> Result<FeasibilityInstance> {
    Ok(match p.manifold {
        ManifoldKind::Spd => feasibility::generate_spd(p.n, p.m, p.r, p.eps, p.seed)?,
        ManifoldKind::Sphere => {
            feasibility::generate_sphere(p.n, p.m, p.r, p.eps, p.seed, p.lambda)?
        }
    })
}

/// Generates the instance and writes it to the plan's output path.
pub fn cmd_generate(plan: &GeneratePlan) -> Result<FeasibilityInstance> {
    let instance = build_instance(&InstanceParams {
        manifold: plan.manifold,
        n: plan.n,
        m: plan.m,
        r: plan.r,
        eps: plan.eps,
        seed: plan.seed,
        lambda: plan.lambda,
    })?;
    instancefile::write_instance(&plan.out, &instance)?;
    Ok(instance)
}

#[derive(Clone, Debug)]
pub struct RunPlan {
    pub instance: FeasibilityInstance,
    pub rule: RuleToken,
    pub alpha_factor: f64,
    pub max_iter: usize,
    pub out: PathBuf,
}

pub fn resolve_run(settings: &Settings, instance_path: Option<&Path>) -> Result<RunPlan> {
    let instance = match instance_path {
        Some(path) => {
            if settings.manifold.is_some() {
                return Err(CliError::usage(
                    "pass either --instance or generation parameters (--manifold ...), not both",
                ));
            }
            instancefile::read_instance(path)?
        }
        None => build_instance(&resolve_instance_settings(settings)?)?,
    };
    // A curvature override tightens (or relaxes) the lower bound used to
    // admit Polyak gains; it only makes sense on the cone.
    let instance = match settings.kappa {
        None => instance,
        Some(kappa) => {
            if instance.manifold().kind() != ManifoldKind::Spd {
                return Err(CliError::usage(
                    "--kappa overrides the curvature bound of spd instances only",
                ));
            }
            let handle = ManifoldHandle::spd_with_curvature_bound(instance.manifold().n(), kappa)?;
            FeasibilityInstance::from_parts(
                handle,
                instance.target().clone(),
                instance.start().clone(),
                instance.centers().to_vec(),
                instance.radius(),
                instance.slack(),
                instance.seed(),
            )?
        }
    };
    Ok(RunPlan {
        instance,
        rule: settings.rule.unwrap_or(RuleToken::Exogenous),
        alpha_factor: settings.alpha_factor.unwrap_or(1.9999),
        max_iter: settings.max_iter.unwrap_or(5000),
        out: require(settings.out.clone(), "out")?,
    })
}

#[derive(Clone, Copy, Debug)]
pub struct RunSummary {
    pub termination: Termination,
    /// Number of subgradient steps taken (records minus one).
    pub steps: usize,
    pub final_value: f64,
}

/// Runs the subgradient method on the plan's instance until feasibility (or
/// the iteration cap) and writes the trace CSV.
pub fn cmd_run(plan: &RunPlan) -> Result<RunSummary> {
    let instance = &plan.instance;
    let oracle = instance.oracle()?;
    let d0 = instance.initial_distance()?;
    let rule = match plan.rule {
        RuleToken::Exogenous => StepSizeRule::harmonic(),
        RuleToken::Polyak => {
            let alpha = plan.alpha_factor * tanh_ratio(d0);
            StepSizeRule::polyak(alpha, -instance.slack(), d0)?
        }
    };
    let config = SolverConfig::new(plan.max_iter, StopMode::Feasibility)
        .with_reference(instance.target().clone());
    let trace = solver::run(instance.manifold(), &oracle, instance.start(), &rule, &config)?;
    csvio::write_trace(&plan.out, &trace.scalar_rows(), trace.termination())?;
    Ok(RunSummary {
        termination: trace.termination(),
        steps: trace.len() - 1,
        final_value: trace.final_record().value,
    })
}

#[derive(Clone, Debug)]
pub struct CertifyPlan {
    pub trace: PathBuf,
    pub theorem: TheoremId,
    pub kappa: f64,
    pub alpha_factor: f64,
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug)]
pub struct CertifySummary {
    pub certified: bool,
    /// Iteration index and margin of the first row below tolerance.
    pub first_violation: Option<(usize, f64)>,
    pub min_margin: f64,
    pub rows: usize,
}

/// Re-evaluates the chosen inequality on every row of the trace, writes the
/// report CSV, and summarizes the verdict. The constants are rebuilt the way
/// the run built them: `tau = 1` (the feasibility objective), `d_ref` from
/// the trace's first distance cell, the harmonic square-sum for exogenous
/// theorems, and `alpha = alpha_factor * tanh(d_ref)/d_ref` for Polyak ones.
pub fn cmd_certify(plan: &CertifyPlan) -> Result<CertifySummary> {
    let (rows, _termination) = csvio::read_trace(&plan.trace)?;
    if rows.is_empty() {
        return Err(CliError::usage("trace has no data rows"));
    }
    let d_ref = rows[0].dist_reference.ok_or_else(|| {
        CliError::usage(
            "trace has an empty dist_ref column; rerun against an instance with a known target",
        )
    })?;
    let rule = match plan.theorem {
        TheoremId::ExogenousComplexity | TheoremId::StepInequality | TheoremId::QuasiFejer => {
            RuleKind::Exogenous {
                sigma: HARMONIC_SIGMA,
            }
        }
        TheoremId::PolyakComplexity
        | TheoremId::PolyakSumBound
        | TheoremId::PolyakDecrease
        | TheoremId::FlatPolyakDecrease => RuleKind::Polyak {
            alpha: plan.alpha_factor * tanh_ratio(d_ref),
        },
    };
    let constants = CurvatureConstants {
        kappa: plan.kappa,
        tau: 1.0,
        d_ref,
        rule,
    };
    let report = geodescent::bounds::certify_trace(&rows, plan.theorem, &constants)?;
    csvio::write_report(&plan.out, &report)?;
    let first_violation = report
        .first_violation
        .map(|i| (report.rows[i].n, report.rows[i].margin));
    Ok(CertifySummary {
        certified: report.is_certified(),
        first_violation,
        min_margin: report.min_margin().expect("nonempty report"),
        rows: report.rows.len(),
    })
}

#[derive(Clone, Debug)]
pub struct PlotPlan {
    pub report: PathBuf,
    pub out: PathBuf,
    pub title: String,
}

/// Renders the report CSV as an SVG chart.
pub fn cmd_plot(plan: &PlotPlan) -> Result<()> {
    let rows = csvio::read_report_rows(&plan.report)?;
    let chart = svg::render_report_chart(&rows, &plan.title)?;
    std::fs::write(&plan.out, chart).map_err(CliError::io(&plan.out))
}
