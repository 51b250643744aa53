//! Curvature-dependent complexity constants and a posteriori certification.
//!
//! For a manifold with curvature lower bound `kappa <= 0`, a
//! `tau`-Lipschitz geodesically convex objective, and the normalized
//! subgradient iteration, the following quantities control convergence
//! (write `|k| = |kappa|` and `d0` for the initial distance to the reference
//! minimizer):
//!
//! * the **exogenous constant**
//!   `C(sigma, kappa, d0) = sinh(sqrt(sigma |k|)) / sqrt(sigma |k|) * (1 + R)`
//!   where `R = arccosh( cosh(sqrt|k| d0) * exp(sqrt(sigma |k|) *
//!   sinh(sqrt(sigma |k|)) / 2) )` and `sigma` is the sum of squared steps;
//!   it tends to 1 in the flat limit `kappa -> 0`;
//! * the **boundedness radius** `R / sqrt|k|`, within which every iterate of
//!   an exogenous run provably stays (flat fallback: `sqrt(d0^2 + sigma)`);
//! * the **Polyak constant** `C(alpha, kappa, d0) = 2/alpha -
//!   sqrt|k| d0 / tanh(sqrt|k| d0)` (flat limit `2/alpha - 1`), positive for
//!   admissible gains, which drives the strict distance decrease
//!   `d(p_{k+1}, q)^2 <= d(p_k, q)^2 - C alpha^2 (f(p_k) - f*)^2 / |s_k|^2`;
//! * the complexity bounds built from them:
//!   - exogenous: `min_{k<=N} f(p_k) - f* <= tau (d0^2 + C sum t_k^2) /
//!     (2 sum t_k)`,
//!   - Polyak: `sum_{k<=N} (f(p_k) - f*)^2 <= tau^2 d0^2 / C` and
//!     `min_{k<=N} f(p_k) - f* <= tau d0 / sqrt(C (N+1))`.
//!
//! [`certify_trace`] re-evaluates a chosen inequality on every prefix (or
//! step) of a recorded run and reports the margins; [`certify_one_step`] checks
//! the one-step geodesic comparison inequalities the bounds are built from.

use crate::error::{Error, Result};
use crate::geometry::{ManifoldHandle, Point, Tangent};
use crate::solver::{subgradient_step, TraceRow};
use crate::tolerances::{ARCCOSH_SLACK, CERTIFICATION_TOLERANCE, FLAT_KAPPA};

// ---------------------------------------------------------------------------
// Scalar helpers
// ---------------------------------------------------------------------------

/// `arccosh(x) = ln(x + sqrt(x^2 - 1))`, delegated to the standard library
/// for stability near 1. Arguments below 1 by at most [`ARCCOSH_SLACK`] are
/// clamped to 1 (pure round-off); anything lower is a domain error.
pub fn arccosh(x: f64) -> Result<f64> {
    if x < 1.0 {
        if x >= 1.0 - ARCCOSH_SLACK {
            return Ok(0.0);
        }
        return Err(Error::ArccoshDomain { argument: x });
    }
    Ok(x.acosh())
}

/// `sinh(x) / x`, continuously extended to 1 at `x = 0`.
pub fn sinh_ratio(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sinh() / x
    }
}

/// `tanh(x) / x`, continuously extended to 1 at `x = 0` (decreasing in `x`).
pub fn tanh_ratio(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.tanh() / x
    }
}

/// `x / tanh(x)`, continuously extended to 1 at `x = 0` (increasing in `x`).
pub fn coth_ratio(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x / x.tanh()
    }
}

// ---------------------------------------------------------------------------
// Constants
// ---------------------------------------------------------------------------

/// Exogenous complexity constant `C(sigma, kappa, d0q)`; 1 in the flat limit
/// (`|kappa| <` [`FLAT_KAPPA`]).
pub fn c_q_kappa(sigma: f64, kappa: f64, d0q: f64) -> f64 {
    let magnitude = kappa.abs();
    if magnitude < FLAT_KAPPA {
        return 1.0;
    }
    let sk = (sigma * magnitude).sqrt();
    let growth = (0.5 * sk * sk.sinh()).exp();
    let reach = arccosh((magnitude.sqrt() * d0q).cosh() * growth)
        .expect("cosh(x) * exp(y) >= 1 for y >= 0");
    sinh_ratio(sk) * (1.0 + reach)
}

/// Polyak decrease constant `2/alpha - sqrt|k| d0 / tanh(sqrt|k| d0)`;
/// `2/alpha - 1` in the flat limit. A nonpositive result means the gain
/// `alpha` violates its admissibility threshold.
pub fn c_kappa_d0(alpha: f64, kappa: f64, d0: f64) -> f64 {
    let magnitude = kappa.abs();
    if magnitude < FLAT_KAPPA {
        return 2.0 / alpha - 1.0;
    }
    2.0 / alpha - coth_ratio(magnitude.sqrt() * d0)
}

/// Radius of the ball around the reference point that provably contains
/// every iterate of an exogenous run. Defined for strictly negative
/// curvature; flat manifolds use [`boundedness_radius_flat`].
pub fn boundedness_radius(sigma: f64, kappa: f64, d0q: f64) -> Result<f64> {
    let magnitude = kappa.abs();
    if magnitude < FLAT_KAPPA {
        return Err(Error::FlatCurvature { kappa });
    }
    let sk = (sigma * magnitude).sqrt();
    let growth = (0.5 * sk * sk.sinh()).exp();
    let reach = arccosh((magnitude.sqrt() * d0q).cosh() * growth)?;
    Ok(reach / magnitude.sqrt())
}

/// Flat-limit boundedness radius `sqrt(d0q^2 + sigma)`.
pub fn boundedness_radius_flat(sigma: f64, d0q: f64) -> f64 {
    (d0q * d0q + sigma).sqrt()
}

/// Exogenous complexity bound
/// `tau (d0^2 + C sum t_k^2) / (2 sum t_k)` over the supplied steps
/// `t_0 ... t_N`.
pub fn exogenous_bound(steps_through_n: &[f64], tau: f64, d0: f64, c: f64) -> f64 {
    let sum: f64 = steps_through_n.iter().sum();
    let sum_sq: f64 = steps_through_n.iter().map(|t| t * t).sum();
    tau * (d0 * d0 + c * sum_sq) / (2.0 * sum)
}

/// Polyak complexity bound `tau d0 / sqrt(C (N+1))`.
pub fn polyak_bound(n: usize, tau: f64, d0: f64, c: f64) -> f64 {
    tau * d0 / (c * (n as f64 + 1.0)).sqrt()
}

/// Polyak square-summability budget `tau^2 d0^2 / C`, an upper bound on the
/// sum of squared gaps over the whole run.
pub fn polyak_sum_bound(tau: f64, d0: f64, c: f64) -> f64 {
    tau * tau * d0 * d0 / c
}

// ---------------------------------------------------------------------------
// One-step geodesic comparison inequalities
// ---------------------------------------------------------------------------

/// Margins (`rhs - lhs`, nonnegative when the inequality holds) of the two
/// one-step comparison inequalities along `gamma(t) = exp_p(-t s / |s|)`.
#[derive(Clone, Copy, Debug)]
pub struct OneStepMargins {
    /// Margin of the hyperbolic-cosine form.
    pub cosh_margin: f64,
    /// Margin of the squared-distance form.
    pub squared_margin: f64,
}

/// Evaluates both one-step comparison inequalities for a subgradient `s` of a
/// geodesically convex `f` at `p`, a comparison point `q`, and a step `t >= 0`
/// on a manifold with curvature bounded below by `kappa < 0`:
///
/// ```text
/// cosh(rk d(g(t), q)) <= cosh(rk d(p, q)) [1 + rk sinh(rk t)
///                         (t/2 - tanh(rk d(p,q))/(rk d(p,q)) (f(p)-f(q))/|s|)]
/// d(g(t), q)^2 <= d(p, q)^2 + sinh(rk t)/rk
///                 [rk d(p,q)/tanh(rk d(p,q)) t - 2 (f(p)-f(q))/|s|]
/// ```
///
/// with `rk = sqrt|kappa|` and `g = gamma`. Both margins are exactly zero at
/// `t = 0` up to round-off.
#[allow(clippy::too_many_arguments)]
pub fn certify_one_step(
    m: &ManifoldHandle,
    p: &Point,
    q: &Point,
    s: &Tangent,
    f_p: f64,
    f_q: f64,
    t: f64,
    kappa: f64,
) -> Result<OneStepMargins> {
    if !(kappa.is_finite() && kappa < 0.0) || kappa.abs() < FLAT_KAPPA {
        return Err(Error::FlatCurvature { kappa });
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "t",
            message: format!("step must be nonnegative and finite, got {t}"),
        });
    }
    let norm = m.norm(p, s)?;
    if norm == 0.0 {
        return Err(Error::ZeroSubgradient);
    }
    let rk = kappa.abs().sqrt();
    let gamma_t = if t == 0.0 {
        p.clone()
    } else {
        subgradient_step(m, p, s, t)?
    };
    let d_pq = m.dist(p, q)?;
    let d_gq = m.dist(&gamma_t, q)?;
    let slope = (f_p - f_q) / norm;

    let cosh_lhs = (rk * d_gq).cosh();
    let cosh_rhs = (rk * d_pq).cosh()
        * (1.0 + rk * (rk * t).sinh() * (0.5 * t - tanh_ratio(rk * d_pq) * slope));

    let squared_lhs = d_gq * d_gq;
    let squared_rhs =
        d_pq * d_pq + ((rk * t).sinh() / rk) * (coth_ratio(rk * d_pq) * t - 2.0 * slope);

    Ok(OneStepMargins {
        cosh_margin: cosh_rhs - cosh_lhs,
        squared_margin: squared_rhs - squared_lhs,
    })
}

// ---------------------------------------------------------------------------
// Trace certification
// ---------------------------------------------------------------------------

/// Which recorded inequality to re-check on a trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TheoremId {
    /// Prefix bound `min_{k<=N} gap_k <= tau (d0^2 + C S2_N) / (2 S1_N)` for
    /// exogenous runs.
    ExogenousComplexity,
    /// Prefix bound `min_{k<=N} gap_k <= tau d0 / sqrt(C (N+1))` for Polyak
    /// runs.
    PolyakComplexity,
    /// Whole-run budget `sum_{k<=N} gap_k^2 <= tau^2 d0^2 / C` for Polyak
    /// runs.
    PolyakSumBound,
    /// Per-step decrease `d_{k+1}^2 <= d_k^2 - C alpha^2 gap_k^2 / |s_k|^2`
    /// for Polyak runs.
    PolyakDecrease,
    /// Per-step decrease `d_{k+1}^2 <= d_k^2 - (2/alpha - 1) t_k^2` valid on
    /// manifolds of nonnegative curvature.
    FlatPolyakDecrease,
    /// Per-step inequality
    /// `d_{k+1}^2 <= d_k^2 + C t_k^2 - 2 t_k gap_k / |s_k|` for exogenous
    /// runs against an optimal reference.
    StepInequality,
    /// Per-step quasi-Fejer inequality `d_{k+1}^2 <= d_k^2 + C t_k^2`.
    QuasiFejer,
}

impl TheoremId {
    /// Stable token used on the command line and in reports.
    pub fn token(&self) -> &'static str {
        match self {
            TheoremId::ExogenousComplexity => "exogenous-complexity",
            TheoremId::PolyakComplexity => "polyak-complexity",
            TheoremId::PolyakSumBound => "polyak-sum",
            TheoremId::PolyakDecrease => "polyak-decrease",
            TheoremId::FlatPolyakDecrease => "flat-polyak-decrease",
            TheoremId::StepInequality => "step-inequality",
            TheoremId::QuasiFejer => "quasi-fejer",
        }
    }

    pub fn from_token(token: &str) -> Option<Self> {
        match token {
            "exogenous-complexity" => Some(TheoremId::ExogenousComplexity),
            "polyak-complexity" => Some(TheoremId::PolyakComplexity),
            "polyak-sum" => Some(TheoremId::PolyakSumBound),
            "polyak-decrease" => Some(TheoremId::PolyakDecrease),
            "flat-polyak-decrease" => Some(TheoremId::FlatPolyakDecrease),
            "step-inequality" => Some(TheoremId::StepInequality),
            "quasi-fejer" => Some(TheoremId::QuasiFejer),
        _ => None,
        }
    }

    fn needs_exogenous_constants(&self) -> bool {
        matches!(
            self,
            TheoremId::ExogenousComplexity | TheoremId::StepInequality | TheoremId::QuasiFejer
        )
    }
}

/// Step-rule data entering the constants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RuleKind {
    /// Exogenous steps with square sum `sigma`.
    Exogenous { sigma: f64 },
    /// Polyak steps with gain `alpha`.
    Polyak { alpha: f64 },
}

/// Everything a certification pass needs besides the trace itself.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvatureConstants {
    /// Curvature lower bound `kappa <= 0` of the manifold the run lived on.
    pub kappa: f64,
    /// Lipschitz constant of the objective.
    pub tau: f64,
    /// Distance from the starting point to the reference minimizer.
    pub d_ref: f64,
    /// Which rule produced the steps, with its scalar data.
    pub rule: RuleKind,
}

impl CurvatureConstants {
    fn validate(&self) -> Result<()> {
        if !(self.kappa.is_finite() && self.kappa <= 0.0) {
            return Err(Error::InvalidParameter {
                name: "kappa",
                message: format!("curvature lower bound must be finite and <= 0, got {}", self.kappa),
            });
        }
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(Error::InvalidParameter {
                name: "tau",
                message: format!("Lipschitz constant must be positive, got {}", self.tau),
            });
        }
        if !(self.d_ref.is_finite() && self.d_ref >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "d_ref",
                message: format!("reference distance must be nonnegative, got {}", self.d_ref),
            });
        }
        match self.rule {
            RuleKind::Exogenous { sigma } => {
                if !(sigma.is_finite() && sigma > 0.0) {
                    return Err(Error::InvalidParameter {
                        name: "sigma",
                        message: format!("step square-sum must be positive, got {sigma}"),
                    });
                }
            }
            RuleKind::Polyak { alpha } => {
                if !(alpha.is_finite() && alpha > 0.0) {
                    return Err(Error::InvalidParameter {
                        name: "alpha",
                        message: format!("Polyak gain must be positive, got {alpha}"),
                    });
                }
            }
        }
        Ok(())
    }

    /// The complexity constant the rule kind induces: `C(sigma, kappa,
    /// d_ref)` for exogenous rules, `C(alpha, kappa, d_ref)` for Polyak
    /// rules.
    pub fn complexity_constant(&self) -> Result<f64> {
        self.validate()?;
        match self.rule {
            RuleKind::Exogenous { sigma } => Ok(c_q_kappa(sigma, self.kappa, self.d_ref)),
            RuleKind::Polyak { alpha } => {
                let c = c_kappa_d0(alpha, self.kappa, self.d_ref);
                if c <= 0.0 {
                    return Err(Error::InvalidParameter {
                        name: "alpha",
                        message: format!(
                            "gain {alpha} is inadmissible at kappa = {}, d = {}: \
                             the decrease constant {c} is not positive",
                            self.kappa, self.d_ref
                        ),
                    });
                }
                Ok(c)
            }
        }
    }
}

/// One certified row: the two sides of the inequality at prefix/step `n` and
/// their margin `rhs - lhs`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundRow {
    pub n: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

/// Result of certifying one theorem against one trace.
#[derive(Clone, Debug)]
pub struct BoundReport {
    pub theorem: TheoremId,
    pub constants: CurvatureConstants,
    /// The complexity constant actually used in the right-hand sides.
    pub complexity_constant: f64,
    pub rows: Vec<BoundRow>,
    /// Index into `rows` of the first margin below the certification
    /// tolerance, if any.
    pub first_violation: Option<usize>,
}

impl BoundReport {
    /// Smallest margin across all rows.
    pub fn min_margin(&self) -> Option<f64> {
        self.rows
            .iter()
            .map(|r| r.margin)
            .reduce(f64::min)
    }

    /// True when every margin clears `-`[`CERTIFICATION_TOLERANCE`].
    pub fn is_certified(&self) -> bool {
        self.first_violation.is_none()
    }
}

fn require(field: Option<f64>, theorem: &'static str, column: &'static str) -> Result<f64> {
    field.ok_or(Error::MissingTraceColumn { theorem, column })
}

/// Re-evaluates `theorem` on every prefix (complexity bounds) or step
/// (one-step inequalities) of the trace rows and reports lhs/rhs/margin per
/// row. Margins below `-`[`CERTIFICATION_TOLERANCE`] mark the report as not
/// certified.
pub fn certify_trace(
    rows: &[TraceRow],
    theorem: TheoremId,
    constants: &CurvatureConstants,
) -> Result<BoundReport> {
    if rows.is_empty() {
        return Err(Error::InvalidParameter {
            name: "trace",
            message: "cannot certify an empty trace".to_string(),
        });
    }
    match (theorem.needs_exogenous_constants(), constants.rule) {
        (true, RuleKind::Polyak { .. }) => {
            return Err(Error::InvalidParameter {
                name: "constants",
                message: format!("{} needs exogenous constants (sigma)", theorem.token()),
            })
        }
        (false, RuleKind::Exogenous { .. }) => {
            return Err(Error::InvalidParameter {
                name: "constants",
                message: format!("{} needs Polyak constants (alpha)", theorem.token()),
            })
        }
        _ => {}
    }
    let c = constants.complexity_constant()?;
    let name = theorem.token();
    let tau = constants.tau;
    let d0 = constants.d_ref;

    let mut out: Vec<BoundRow> = Vec::new();
    match theorem {
        TheoremId::ExogenousComplexity => {
            let mut sum_t = 0.0;
            let mut sum_t_sq = 0.0;
            let mut best_gap = f64::INFINITY;
            for row in rows {
                let gap = require(row.gap, name, "gap")?;
                let t = require(row.step, name, "step")?;
                best_gap = best_gap.min(gap);
                sum_t += t;
                sum_t_sq += t * t;
                let rhs = tau * (d0 * d0 + c * sum_t_sq) / (2.0 * sum_t);
                out.push(BoundRow {
                    n: row.k,
                    lhs: best_gap,
                    rhs,
                    margin: rhs - best_gap,
                });
            }
        }
        TheoremId::PolyakComplexity => {
            let mut best_gap = f64::INFINITY;
            for (n, row) in rows.iter().enumerate() {
                let gap = require(row.gap, name, "gap")?;
                best_gap = best_gap.min(gap);
                let rhs = polyak_bound(n, tau, d0, c);
                out.push(BoundRow {
                    n: row.k,
                    lhs: best_gap,
                    rhs,
                    margin: rhs - best_gap,
                });
            }
        }
        TheoremId::PolyakSumBound => {
            let rhs = polyak_sum_bound(tau, d0, c);
            let mut sum_sq = 0.0;
            for row in rows {
                let gap = require(row.gap, name, "gap")?;
                sum_sq += gap * gap;
                out.push(BoundRow {
                    n: row.k,
                    lhs: sum_sq,
                    rhs,
                    margin: rhs - sum_sq,
                });
            }
        }
        TheoremId::PolyakDecrease => {
            let alpha = match constants.rule {
                RuleKind::Polyak { alpha } => alpha,
                RuleKind::Exogenous { .. } => unreachable!("checked above"),
            };
            for pair in rows.windows(2) {
                let (here, next) = (&pair[0], &pair[1]);
                let d_here = require(here.dist_reference, name, "dist_ref")?;
                let d_next = require(next.dist_reference, name, "dist_ref")?;
                let gap = require(here.gap, name, "gap")?;
                if here.subgradient_norm <= 0.0 {
                    return Err(Error::MissingTraceColumn {
                        theorem: name,
                        column: "subgrad_norm (positive)",
                    });
                }
                let lhs = d_next * d_next;
                let rhs = d_here * d_here
                    - c * alpha * alpha * gap * gap
                        / (here.subgradient_norm * here.subgradient_norm);
                out.push(BoundRow {
                    n: here.k,
                    lhs,
                    rhs,
                    margin: rhs - lhs,
                });
            }
        }
        TheoremId::FlatPolyakDecrease => {
            for pair in rows.windows(2) {
                let (here, next) = (&pair[0], &pair[1]);
                let d_here = require(here.dist_reference, name, "dist_ref")?;
                let d_next = require(next.dist_reference, name, "dist_ref")?;
                let t = require(here.step, name, "step")?;
                let lhs = d_next * d_next;
                let rhs = d_here * d_here - c * t * t;
                out.push(BoundRow {
                    n: here.k,
                    lhs,
                    rhs,
                    margin: rhs - lhs,
                });
            }
        }
        TheoremId::StepInequality | TheoremId::QuasiFejer => {
            for pair in rows.windows(2) {
                let (here, next) = (&pair[0], &pair[1]);
                let d_here = require(here.dist_reference, name, "dist_ref")?;
                let d_next = require(next.dist_reference, name, "dist_ref")?;
                let t = require(here.step, name, "step")?;
                let mut rhs = d_here * d_here + c * t * t;
                if theorem == TheoremId::StepInequality {
                    let gap = require(here.gap, name, "gap")?;
                    if here.subgradient_norm <= 0.0 {
                        return Err(Error::MissingTraceColumn {
                            theorem: name,
                            column: "subgrad_norm (positive)",
                        });
                    }
                    rhs -= 2.0 * t * gap / here.subgradient_norm;
                }
                let lhs = d_next * d_next;
                out.push(BoundRow {
                    n: here.k,
                    lhs,
                    rhs,
                    margin: rhs - lhs,
                });
            }
        }
    }

    let first_violation = out
        .iter()
        .position(|row| row.margin < -CERTIFICATION_TOLERANCE);
    Ok(BoundReport {
        theorem,
        constants: *constants,
        complexity_constant: c,
        rows: out,
        first_violation,
    })
}
