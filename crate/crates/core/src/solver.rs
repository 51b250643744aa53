//! Normalized Riemannian subgradient iteration.
//!
//! Given an oracle for a geodesically convex `f`, the method iterates
//!
//! ```text
//! p_{k+1} = exp_{p_k}( -t_k s_k / |s_k| ),    s_k in  subdiff f(p_k),
//! ```
//!
//! stopping immediately when `s_k = 0` (which certifies optimality). Two
//! step-size strategies are supported:
//!
//! * **Exogenous**: a caller-chosen square-summable sequence `t_k`, by
//!   default the harmonic sequence `t_k = 1 / (k + 1)` whose squares sum to
//!   `sigma = pi^2 / 6`;
//! * **Polyak**: `t_k = alpha (f(p_k) - f*) / |s_k|`, which needs the optimal
//!   value `f*` and a gain `0 < alpha < 2 tanh(sqrt|kappa| d) / (sqrt|kappa| d)`
//!   evaluated at (an upper bound on) the initial distance `d` to a
//!   minimizer; the threshold relaxes to 2 in the flat limit `kappa = 0`.
//!
//! Each run returns an [`IterateTrace`] recording, per iterate, the value,
//! step, subgradient norm, optimality gap, best value so far, and distance to
//! an optional reference point — everything the certification module needs to
//! re-check the complexity bounds a posteriori.

use std::sync::Arc;

use crate::bounds::tanh_ratio;
use crate::convex::SubgradientOracle;
use crate::error::{Error, Result};
use crate::geometry::{ManifoldHandle, Point, Tangent};
use crate::tolerances::FLAT_KAPPA;

/// Default exogenous step sequence `t_k = 1 / (k + 1)`.
pub fn exogenous_default(k: usize) -> f64 {
    1.0 / (k as f64 + 1.0)
}

/// Sum of squares of the default sequence: `pi^2 / 6` (exact limit).
pub const HARMONIC_SIGMA: f64 = std::f64::consts::PI * std::f64::consts::PI / 6.0;

/// Polyak step `alpha (value - f*) / norm`; zero exactly at `value = f*`.
pub fn polyak_step(value: f64, f_star: f64, subgradient_norm: f64, alpha: f64) -> f64 {
    alpha * (value - f_star) / subgradient_norm
}

/// Upper limit for the Polyak gain: `2 tanh(sqrt|kappa| d) / (sqrt|kappa| d)`
/// for `kappa < 0`, and 2 in the flat limit. Any gain strictly below this
/// value yields a monotone decrease of the distance to the minimizer used to
/// compute `d`.
pub fn polyak_alpha_upper(kappa: f64, d_hat: f64) -> f64 {
    let magnitude = kappa.abs();
    if magnitude < FLAT_KAPPA {
        2.0
    } else {
        2.0 * tanh_ratio(magnitude.sqrt() * d_hat)
    }
}

/// The exogenous sequence of a [`StepSizeRule::Exogenous`] rule.
#[derive(Clone)]
pub enum StepSequence {
    /// `t_k = 1 / (k + 1)`.
    Harmonic,
    /// Arbitrary caller-supplied sequence (must be square-summable; the
    /// caller vouches for the accompanying `sigma`).
    Custom(Arc<dyn Fn(usize) -> f64 + Send + Sync>),
}

impl StepSequence {
    pub fn value(&self, k: usize) -> f64 {
        match self {
            StepSequence::Harmonic => exogenous_default(k),
            StepSequence::Custom(f) => f(k),
        }
    }
}

impl std::fmt::Debug for StepSequence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StepSequence::Harmonic => write!(f, "Harmonic"),
            StepSequence::Custom(_) => write!(f, "Custom"),
        }
    }
}

/// Step-size strategy for [`run`].
#[derive(Clone, Debug)]
pub enum StepSizeRule {
    /// Predetermined square-summable steps with `sigma = sum_k t_k^2`.
    Exogenous {
        sequence: StepSequence,
        sigma: f64,
    },
    /// `t_k = alpha (f(p_k) - f_star) / |s_k|` with `d_hat` an upper bound on
    /// the distance from the start to a minimizer.
    Polyak {
        alpha: f64,
        f_star: f64,
        d_hat: f64,
    },
}

impl StepSizeRule {
    /// The default exogenous rule `t_k = 1 / (k + 1)` with its analytic
    /// square sum `pi^2 / 6`.
    pub fn harmonic() -> Self {
        StepSizeRule::Exogenous {
            sequence: StepSequence::Harmonic,
            sigma: HARMONIC_SIGMA,
        }
    }

    /// A custom exogenous sequence; `sigma` must be its finite, positive sum
    /// of squares.
    pub fn exogenous<F>(sequence: F, sigma: f64) -> Result<Self>
    where
        F: Fn(usize) -> f64 + Send + Sync + 'static,
    {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidStepRule {
                message: format!("sigma must be finite and positive, got {sigma}"),
            });
        }
        Ok(StepSizeRule::Exogenous {
            sequence: StepSequence::Custom(Arc::new(sequence)),
            sigma,
        })
    }

    /// Polyak rule; the gain is validated against the curvature-dependent
    /// threshold when the rule is handed to [`run`].
    pub fn polyak(alpha: f64, f_star: f64, d_hat: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidStepRule {
                message: format!("alpha must be finite and positive, got {alpha}"),
            });
        }
        if !f_star.is_finite() {
            return Err(Error::InvalidStepRule {
                message: format!("f_star must be finite, got {f_star}"),
            });
        }
        if !(d_hat.is_finite() && d_hat >= 0.0) {
            return Err(Error::InvalidStepRule {
                message: format!("d_hat must be finite and nonnegative, got {d_hat}"),
            });
        }
        Ok(StepSizeRule::Polyak {
            alpha,
            f_star,
            d_hat,
        })
    }
}

/// Additional stopping test applied on top of the always-on zero-subgradient
/// test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StopMode {
    /// Stop only when a zero subgradient certifies optimality.
    SubgradientZero,
    /// Stop once `f(p_k) <= 0` (feasibility problems).
    Feasibility,
    /// Stop once `f(p_k) - f* <= tol`; requires a known optimal value.
    Gap(f64),
}

/// Why a run ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    /// The oracle returned the zero subgradient: `p_k` is optimal.
    ZeroSubgradient,
    /// Feasibility held already at the starting point.
    FeasibleAtStart,
    /// The feasibility test `f <= 0` fired after at least one step.
    Feasible,
    /// The gap test fired (or a Polyak step degenerated to zero because the
    /// value reached `f*`).
    GapReached,
    /// The iteration budget ran out.
    MaxIterations,
}

impl Termination {
    /// Stable token used in trace footers.
    pub fn token(&self) -> &'static str {
        match self {
            Termination::ZeroSubgradient => "zero_subgradient",
            Termination::FeasibleAtStart => "feasible_at_start",
            Termination::Feasible => "feasible",
            Termination::GapReached => "gap_reached",
            Termination::MaxIterations => "max_iterations",
        }
    }

    pub fn from_token(token: &str) -> Option<Self> {
        match token {
            "zero_subgradient" => Some(Termination::ZeroSubgradient),
            "feasible_at_start" => Some(Termination::FeasibleAtStart),
            "feasible" => Some(Termination::Feasible),
            "gap_reached" => Some(Termination::GapReached),
            "max_iterations" => Some(Termination::MaxIterations),
            _ => None,
        }
    }
}

/// Configuration of a single solver run.
#[derive(Clone, Debug)]
pub struct SolverConfig {
    /// Maximum number of steps taken (the trace holds at most this many
    /// non-terminal records plus the terminal one).
    pub max_iterations: usize,
    /// Extra stopping test.
    pub stop_mode: StopMode,
    /// Optional reference point whose distance to each iterate is recorded
    /// (typically a known minimizer, enabling distance-based certification).
    pub reference: Option<Point>,
}

impl SolverConfig {
    pub fn new(max_iterations: usize, stop_mode: StopMode) -> Self {
        SolverConfig {
            max_iterations,
            stop_mode,
            reference: None,
        }
    }

    pub fn with_reference(mut self, reference: Point) -> Self {
        self.reference = Some(reference);
        self
    }
}

/// One recorded iterate.
#[derive(Clone, Debug, PartialEq)]
pub struct IterateRecord {
    /// Iteration counter, starting at 0.
    pub k: usize,
    /// The iterate `p_k`.
    pub point: Point,
    /// Objective value `f(p_k)`.
    pub value: f64,
    /// Step `t_k` the rule prescribes at `p_k`. Present on every record where
    /// it is well defined — including the terminal record for exogenous rules
    /// — so bound certification has a step for every row; `None` only when no
    /// positive Polyak step exists (zero subgradient or value at `f*`).
    pub step: Option<f64>,
    /// Riemannian norm `|s_k|`.
    pub subgradient_norm: f64,
    /// Optimality gap `f(p_k) - f*` when the oracle knows `f*`.
    pub gap: Option<f64>,
    /// Distance `d(p_k, reference)` when a reference point was configured.
    pub dist_reference: Option<f64>,
    /// Best objective value seen through iteration `k`.
    pub best_value: f64,
}

/// Full account of a solver run.
#[derive(Clone, Debug, PartialEq)]
pub struct IterateTrace {
    records: Vec<IterateRecord>,
    termination: Termination,
}

/// Scalar view of one trace record — everything certification needs, without
/// the manifold coordinates. Traces loaded back from CSV files materialize
/// only these rows.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRow {
    pub k: usize,
    pub value: f64,
    pub gap: Option<f64>,
    pub step: Option<f64>,
    pub subgradient_norm: f64,
    pub dist_reference: Option<f64>,
}

impl IterateTrace {
    pub fn records(&self) -> &[IterateRecord] {
        &self.records
    }

    pub fn termination(&self) -> Termination {
        self.termination
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn final_record(&self) -> &IterateRecord {
        self.records.last().expect("a trace holds at least one record")
    }

    /// Best objective value over the whole run.
    pub fn best_value(&self) -> f64 {
        self.final_record().best_value
    }

    /// Scalar rows for certification.
    pub fn scalar_rows(&self) -> Vec<TraceRow> {
        self.records
            .iter()
            .map(|r| TraceRow {
                k: r.k,
                value: r.value,
                gap: r.gap,
                step: r.step,
                subgradient_norm: r.subgradient_norm,
                dist_reference: r.dist_reference,
            })
            .collect()
    }
}

/// One normalized subgradient step `exp_p(-t s / |s|)`.
///
/// Requires `s != 0` and `t > 0`; the travelled geodesic distance equals `t`
/// (up to round-off) because the direction has unit norm.
pub fn subgradient_step(m: &ManifoldHandle, p: &Point, s: &Tangent, t: f64) -> Result<Point> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::InvalidParameter {
            name: "t",
            message: format!("step length must be positive and finite, got {t}"),
        });
    }
    let norm = m.norm(p, s)?;
    if norm == 0.0 {
        return Err(Error::ZeroSubgradient);
    }
    m.exp(p, &s.scaled(-t / norm))
}

/// Runs the subgradient iteration from `p0` until a stopping test fires.
///
/// The trace always contains the starting point; every record before the last
/// carries the step that produced its successor. Runs are fully
/// deterministic: the same oracle, start, rule, and config reproduce the
/// trace bit for bit.
pub fn run(
    m: &ManifoldHandle,
    oracle: &dyn SubgradientOracle,
    p0: &Point,
    rule: &StepSizeRule,
    config: &SolverConfig,
) -> Result<IterateTrace> {
    if config.max_iterations < 1 {
        return Err(Error::InvalidParameter {
            name: "max_iterations",
            message: "at least one iteration must be allowed".to_string(),
        });
    }
    if let StopMode::Gap(tol) = config.stop_mode {
        if oracle.optimal_value().is_none() {
            return Err(Error::InvalidParameter {
                name: "stop_mode",
                message: "gap stopping needs an oracle with a known optimal value".to_string(),
            });
        }
        if !(tol.is_finite() && tol >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "stop_mode",
                message: format!("gap tolerance must be nonnegative and finite, got {tol}"),
            });
        }
    }
    if let StepSizeRule::Polyak { alpha, d_hat, .. } = rule {
        let upper = polyak_alpha_upper(m.curvature_lower(), *d_hat);
        if *alpha >= upper {
            return Err(Error::InvalidStepRule {
                message: format!(
                    "Polyak gain {alpha} must lie strictly below the curvature threshold {upper} \
                     (kappa = {}, d_hat = {d_hat})",
                    m.curvature_lower()
                ),
            });
        }
    }

    let f_star = oracle.optimal_value();
    let mut records: Vec<IterateRecord> = Vec::new();
    let mut point = p0.clone();
    let mut best = f64::INFINITY;

    let mut k = 0usize;
    let termination = loop {
        let eval = oracle.evaluate(&point)?;
        let norm = m.norm(&point, &eval.subgradient)?;
        best = best.min(eval.value);
        let gap = f_star.map(|fs| eval.value - fs);
        let dist_reference = match &config.reference {
            Some(q) => Some(m.dist(&point, q)?),
            None => None,
        };

        // The step the rule prescribes here, recorded even on the terminal
        // iterate whenever it is well defined.
        let step = match rule {
            StepSizeRule::Exogenous { sequence, .. } => {
                let t = sequence.value(k);
                if !(t.is_finite() && t > 0.0) {
                    return Err(Error::InvalidStepRule {
                        message: format!("exogenous step t_{k} = {t} is not positive and finite"),
                    });
                }
                Some(t)
            }
            StepSizeRule::Polyak { alpha, f_star, .. } => {
                if norm > 0.0 {
                    let t = polyak_step(eval.value, *f_star, norm, *alpha);
                    (t > 0.0).then_some(t)
                } else {
                    None
                }
            }
        };

        records.push(IterateRecord {
            k,
            point: point.clone(),
            value: eval.value,
            step,
            subgradient_norm: norm,
            gap,
            dist_reference,
            best_value: best,
        });

        // Stopping tests, in a fixed order: the configured mode first, then
        // the built-in zero-subgradient certificate, then the budget.
        match config.stop_mode {
            StopMode::Feasibility if eval.value <= 0.0 => {
                break if k == 0 {
                    Termination::FeasibleAtStart
                } else {
                    Termination::Feasible
                };
            }
            StopMode::Gap(tol) => {
                let g = gap.expect("validated above");
                if g <= tol {
                    break Termination::GapReached;
                }
            }
            _ => {}
        }
        if norm == 0.0 {
            break Termination::ZeroSubgradient;
        }
        if k == config.max_iterations {
            break Termination::MaxIterations;
        }
        let t = match step {
            Some(t) => t,
            // A Polyak step of zero means the value already equals f*.
            None => break Termination::GapReached,
        };
        point = subgradient_step(m, &point, &eval.subgradient, t)?;
        k += 1;
    };

    Ok(IterateTrace {
        records,
        termination,
    })
}
