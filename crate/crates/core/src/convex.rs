//! Subgradient oracles for geodesic distance objectives.
//!
//! A subgradient of a geodesically convex `f` at `p` is a tangent `s` with
//!
//! ```text
//! f(q) >= f(p) + <s, log_p(q)>_p    for all q,
//! ```
//!
//! and an oracle returns the triple (value, subgradient, active index). Two
//! oracles are provided:
//!
//! * [`DistanceOracle`]: `f(p) = d(p, a)`, whose subgradient away from `a` is
//!   the unit vector `-log_p(a) / d(p, a)` and at `a` is the zero vector;
//! * [`FeasibilityOracle`]: `f(p) = max{ max_i d(p, a_i) - r - eps, -eps }`,
//!   the slack-shifted max-distance function to a family of closed balls
//!   `B[a_i, r]`. Its minimum value is exactly `-eps`, attained on the
//!   eps-deep interior of the intersection, so driving `f` to `<= 0` proves
//!   membership in every ball.
//!
//! Both objectives are 1-Lipschitz, which the solver and the complexity
//! bounds rely on through [`SubgradientOracle::lipschitz_constant`].

use crate::error::{Error, Result};
use crate::geometry::{ManifoldHandle, Point, Tangent};

/// One oracle answer at a query point.
#[derive(Clone, Debug)]
pub struct OracleEvaluation {
    /// Objective value `f(p)`.
    pub value: f64,
    /// A subgradient of `f` at the query point.
    pub subgradient: Tangent,
    /// Index of the distance term attaining the max, if one did (the slack
    /// branch of the feasibility objective reports `None`).
    pub active_index: Option<usize>,
}

/// First-order oracle interface consumed by the solver and the certifiers.
pub trait SubgradientOracle {
    /// Evaluate value and subgradient at `p`.
    fn evaluate(&self, p: &Point) -> Result<OracleEvaluation>;

    /// A Lipschitz constant `tau` of the objective with respect to geodesic
    /// distance; subgradient norms never exceed it.
    fn lipschitz_constant(&self) -> f64;

    /// The optimal value `f*`, when known in closed form.
    fn optimal_value(&self) -> Option<f64>;

    /// The manifold the oracle lives on.
    fn manifold(&self) -> &ManifoldHandle;
}

/// Oracle for the distance objective `f(p) = d(p, a)`.
#[derive(Clone, Debug)]
pub struct DistanceOracle {
    manifold: ManifoldHandle,
    center: Point,
}

impl DistanceOracle {
    pub fn new(manifold: ManifoldHandle, center: Point) -> Result<Self> {
        // Shape check doubles as a membership guard for deserialized points.
        manifold.dist(&center, &center)?;
        Ok(DistanceOracle { manifold, center })
    }

    pub fn center(&self) -> &Point {
        &self.center
    }
}

impl SubgradientOracle for DistanceOracle {
    fn evaluate(&self, p: &Point) -> Result<OracleEvaluation> {
        let d = self.manifold.dist(p, &self.center)?;
        let subgradient = if d > 0.0 {
            let toward = self.manifold.log(p, &self.center)?;
            if toward.is_zero() {
                self.manifold.zero_tangent(p)
            } else {
                toward.scaled(-1.0 / d)
            }
        } else {
            // At the center every tangent of norm <= 1 is a subgradient; the
            // zero vector is the canonical minimal-norm choice and doubles as
            // the stationarity certificate.
            self.manifold.zero_tangent(p)
        };
        Ok(OracleEvaluation {
            value: d,
            subgradient,
            active_index: None,
        })
    }

    fn lipschitz_constant(&self) -> f64 {
        1.0
    }

    fn optimal_value(&self) -> Option<f64> {
        Some(0.0)
    }

    fn manifold(&self) -> &ManifoldHandle {
        &self.manifold
    }
}

/// Oracle for the ball-intersection feasibility objective
/// `f(p) = max{ max_i d(p, a_i) - r - eps, -eps }`.
#[derive(Clone, Debug)]
pub struct FeasibilityOracle {
    manifold: ManifoldHandle,
    centers: Vec<Point>,
    radius: f64,
    slack: f64,
}

impl FeasibilityOracle {
    /// `radius` and `slack` must be positive and finite; at least one center
    /// is required.
    pub fn new(
        manifold: ManifoldHandle,
        centers: Vec<Point>,
        radius: f64,
        slack: f64,
    ) -> Result<Self> {
        if centers.is_empty() {
            return Err(Error::InvalidParameter {
                name: "centers",
                message: "feasibility oracle needs at least one ball center".to_string(),
            });
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidParameter {
                name: "radius",
                message: format!("ball radius must be positive and finite, got {radius}"),
            });
        }
        if !(slack.is_finite() && slack > 0.0) {
            return Err(Error::InvalidParameter {
                name: "slack",
                message: format!("slack eps must be positive and finite, got {slack}"),
            });
        }
        for center in &centers {
            manifold.dist(center, center)?;
        }
        Ok(FeasibilityOracle {
            manifold,
            centers,
            radius,
            slack,
        })
    }

    pub fn centers(&self) -> &[Point] {
        &self.centers
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn slack(&self) -> f64 {
        self.slack
    }
}

impl SubgradientOracle for FeasibilityOracle {
    fn evaluate(&self, p: &Point) -> Result<OracleEvaluation> {
        // Scan for the farthest center; strict comparison keeps the lowest
        // index on exact ties, which pins down the subgradient selection.
        let mut best_index = 0usize;
        let mut best_distance = f64::NEG_INFINITY;
        for (i, center) in self.centers.iter().enumerate() {
            let d = self.manifold.dist(p, center)?;
            if d > best_distance {
                best_distance = d;
                best_index = i;
            }
        }
        let best_term = best_distance - self.radius - self.slack;

        if best_term <= -self.slack {
            // The constant slack branch is active: p already sits inside
            // every ball with margin, and 0 is a subgradient of the max.
            return Ok(OracleEvaluation {
                value: -self.slack,
                subgradient: self.manifold.zero_tangent(p),
                active_index: None,
            });
        }

        // Active distance term; best_distance > 0 because best_term > -slack
        // forces d > radius > 0, so the normalization below is safe.
        let toward = self.manifold.log(p, &self.centers[best_index])?;
        let subgradient = if toward.is_zero() {
            self.manifold.zero_tangent(p)
        } else {
            toward.scaled(-1.0 / best_distance)
        };
        Ok(OracleEvaluation {
            value: best_term,
            subgradient,
            active_index: Some(best_index),
        })
    }

    fn lipschitz_constant(&self) -> f64 {
        1.0
    }

    /// The minimum equals `-eps` whenever the eps-deep intersection is
    /// nonempty, which the instance generators guarantee by construction.
    fn optimal_value(&self) -> Option<f64> {
        Some(-self.slack)
    }

    fn manifold(&self) -> &ManifoldHandle {
        &self.manifold
    }
}

/// Convexity margin `f(q) - f(p) - <s, log_p(q)>_p` of the oracle's answer
/// at `p` tested against `q`. Nonnegative (up to round-off) whenever the
/// subgradient is valid and both points lie in a region where the objective
/// is geodesically convex.
pub fn check_subgradient(
    m: &ManifoldHandle,
    oracle: &dyn SubgradientOracle,
    p: &Point,
    q: &Point,
) -> Result<f64> {
    let at_p = oracle.evaluate(p)?;
    let at_q = oracle.evaluate(q)?;
    let toward_q = m.log(p, q)?;
    let slope = m.inner(p, &at_p.subgradient, &toward_q)?;
    Ok(at_q.value - at_p.value - slope)
}
