//! Seeded generators for ball-intersection feasibility instances.
//!
//! An instance places `m` ball centers `a_i = exp_q(r v_i / |v_i|)` on the
//! boundary sphere of radius `r` around a hidden point `q`, so that the
//! slack-`eps` feasible set `{p : max_i d(p, a_i) <= r + eps}` contains the
//! ball `B[q, eps]` and the associated max-distance objective attains its
//! minimum `-eps` at `q`. The known minimizer makes every run fully
//! checkable: the optimal value, a reference point for distance traces, and
//! the initial distance `d(p0, q)` feeding the Polyak gain are all exact.
//!
//! Randomness comes from ChaCha8 seeded with a caller-supplied 64-bit
//! integer; the draw order is fixed and documented per generator, so
//! instances are bit-reproducible across platforms.

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::convex::FeasibilityOracle;
use crate::error::{Error, Result};
use crate::geometry::{ManifoldHandle, Point, Tangent};
use crate::tolerances::CENTER_DISTANCE_TOLERANCE;

/// A ball-intersection feasibility problem with a known interior solution.
#[derive(Clone, Debug)]
pub struct FeasibilityInstance {
    manifold: ManifoldHandle,
    centers: Vec<Point>,
    radius: f64,
    slack: f64,
    target: Point,
    start: Point,
    seed: Option<u64>,
}

impl FeasibilityInstance {
    /// Assembles an instance from explicit parts and checks its invariants:
    /// every center sits at distance `radius` from `target` (within
    /// [`CENTER_DISTANCE_TOLERANCE`]), `radius` is positive and below the
    /// manifold's safety radius, and `slack` is positive.
    pub fn from_parts(
        manifold: ManifoldHandle,
        target: Point,
        start: Point,
        centers: Vec<Point>,
        radius: f64,
        slack: f64,
        seed: Option<u64>,
    ) -> Result<Self> {
        // Points may have been built under a different handle; revalidate
        // membership here.
        manifold.point(target.coords().clone())?;
        manifold.point(start.coords().clone())?;
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidParameter {
                name: "radius",
                message: format!("ball radius must be positive and finite, got {radius}"),
            });
        }
        if radius >= manifold.safety_radius() {
            return Err(Error::InvalidParameter {
                name: "radius",
                message: format!(
                    "ball radius {radius} must stay below the safety radius {}",
                    manifold.safety_radius()
                ),
            });
        }
        if !(slack.is_finite() && slack > 0.0) {
            return Err(Error::InvalidParameter {
                name: "slack",
                message: format!("slack must be positive and finite, got {slack}"),
            });
        }
        if centers.is_empty() {
            return Err(Error::InvalidParameter {
                name: "centers",
                message: "a feasibility instance needs at least one ball center".to_string(),
            });
        }
        for (i, center) in centers.iter().enumerate() {
            let d = manifold.dist(&target, center)?;
            if (d - radius).abs() > CENTER_DISTANCE_TOLERANCE {
                return Err(Error::InvalidParameter {
                    name: "centers",
                    message: format!(
                        "center {i} sits at distance {d} from the target, expected {radius}"
                    ),
                });
            }
        }
        Ok(FeasibilityInstance {
            manifold,
            centers,
            radius,
            slack,
            target,
            start,
            seed,
        })
    }

    pub fn manifold(&self) -> &ManifoldHandle {
        &self.manifold
    }

    /// The hidden minimizer `q`; the objective attains `-slack` here.
    pub fn target(&self) -> &Point {
        &self.target
    }

    /// The starting point `p0` handed to the solver.
    pub fn start(&self) -> &Point {
        &self.start
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

    /// Seed the instance was generated from, if it came from a generator.
    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Distance from the start to the hidden minimizer; a valid Polyak
    /// distance estimate because the minimizer belongs to the solution set.
    pub fn initial_distance(&self) -> Result<f64> {
        self.manifold.dist(&self.start, &self.target)
    }

    /// The max-distance objective `f(p) = max{max_i d(p, a_i) - r - eps,
    /// -eps}` for this instance.
    pub fn oracle(&self) -> Result<FeasibilityOracle> {
        FeasibilityOracle::new(self.manifold, self.centers.clone(), self.radius, self.slack)
    }

    /// True when `p` lies in every slack-enlarged ball, i.e. `max_i d(p,
    /// a_i) <= radius + slack`.
    pub fn is_feasible(&self, p: &Point) -> Result<bool> {
        let budget = self.radius + self.slack;
        for center in &self.centers {
            if self.manifold.dist(p, center)? > budget {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Places a ball center at distance `r` from `q` along the direction of `v`:
/// `exp_q(r v / |v|)`. Scaling `v` does not change the result. `r` must be
/// positive and below the manifold's safety radius.
pub fn place_center(m: &ManifoldHandle, q: &Point, v: &Tangent, r: f64) -> Result<Point> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::InvalidParameter {
            name: "r",
            message: format!("center distance must be positive and finite, got {r}"),
        });
    }
    if r >= m.safety_radius() {
        return Err(Error::InvalidParameter {
            name: "r",
            message: format!(
                "center distance {r} must stay below the safety radius {}",
                m.safety_radius()
            ),
        });
    }
    let norm = m.norm(q, v)?;
    if norm == 0.0 {
        return Err(Error::InvalidTangent {
            detail: "cannot place a center along a zero direction".to_string(),
        });
    }
    m.exp(q, &v.scaled(r / norm))
}

/// Draws a random symmetric matrix `Q diag(lambda) Q^T` with eigenvalues
/// `lambda_j` uniform in `(lo, hi)` and `Q` orthogonal from the QR
/// factorization of a Gaussian matrix (signs fixed so the factorization is
/// unique). Draw order: the `n` eigenvalues, then the `n^2` Gaussian entries
/// column-major.
fn random_symmetric_with_spectrum<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    lo: f64,
    hi: f64,
) -> DMatrix<f64> {
    let eigenvalues: Vec<f64> = (0..n)
        .map(|_| loop {
            let x = rng.random_range(lo..hi);
            if x > lo {
                break x;
            }
        })
        .collect();
    let gaussian = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = gaussian.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    let lambda = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(eigenvalues));
    let raw = &q * lambda * q.transpose();
    crate::geometry::spectral::symmetrize(&raw)
}

/// Generates a feasibility instance on the positive-definite cone: the
/// hidden target `q` and the start `p0` are random symmetric matrices with
/// spectrum in `(0, 100)`, and each center direction is a random symmetric
/// matrix with spectrum in `(-100, 100)`. Draw order from the ChaCha8 stream:
/// `q`, `p0`, then the `m` center directions.
pub fn generate_spd(
    n: usize,
    m: usize,
    radius: f64,
    slack: f64,
    seed: u64,
) -> Result<FeasibilityInstance> {
    if m == 0 {
        return Err(Error::InvalidParameter {
            name: "m",
            message: "need at least one ball center".to_string(),
        });
    }
    let manifold = ManifoldHandle::spd(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let target = manifold.point(random_symmetric_with_spectrum(&mut rng, n, 0.0, 100.0))?;
    let start = manifold.point(random_symmetric_with_spectrum(&mut rng, n, 0.0, 100.0))?;
    let mut centers = Vec::with_capacity(m);
    for _ in 0..m {
        let direction = random_symmetric_with_spectrum(&mut rng, n, -100.0, 100.0);
        let v = manifold.tangent(&target, direction)?;
        centers.push(place_center(&manifold, &target, &v, radius)?);
    }
    FeasibilityInstance::from_parts(manifold, target, start, centers, radius, slack, Some(seed))
}

/// Generates a feasibility instance on the unit sphere: the hidden target is
/// `q = (1, ..., 1) / sqrt(n)`, the start is `p0 = exp_q(lambda (pi/8) u)`
/// for a random unit tangent `u` and a mixing factor `lambda` in `[0, 1)`
/// (`lambda = 0` starts exactly at the already-feasible target), and the
/// centers sit at distance `radius` along random unit tangents. `radius`
/// must stay below the sphere's safety radius `pi/4`.
///
/// Draw order from the ChaCha8 stream: `lambda` (one uniform draw, skipped
/// entirely when a value is supplied), the start direction `u`, then the `m`
/// center directions.
pub fn generate_sphere(
    n: usize,
    m: usize,
    radius: f64,
    slack: f64,
    seed: u64,
    lambda: Option<f64>,
) -> Result<FeasibilityInstance> {
    if m == 0 {
        return Err(Error::InvalidParameter {
            name: "m",
            message: "need at least one ball center".to_string(),
        });
    }
    if let Some(l) = lambda {
        if !(l.is_finite() && (0.0..1.0).contains(&l)) {
            return Err(Error::InvalidParameter {
                name: "lambda",
                message: format!("mixing factor must lie in [0, 1), got {l}"),
            });
        }
    }
    let manifold = ManifoldHandle::sphere(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 1.0 / (n as f64).sqrt();
    let target = manifold.point(DMatrix::from_element(n, 1, scale))?;
    let lambda = match lambda {
        Some(l) => l,
        None => loop {
            let x = rng.random_range(0.0..1.0);
            if x > 0.0 {
                break x;
            }
        },
    };
    let u = manifold.random_unit_tangent(&target, &mut rng)?;
    let start = manifold.exp(&target, &u.scaled(lambda * std::f64::consts::FRAC_PI_8))?;
    let mut centers = Vec::with_capacity(m);
    for _ in 0..m {
        let v = manifold.random_unit_tangent(&target, &mut rng)?;
        centers.push(place_center(&manifold, &target, &v, radius)?);
    }
    FeasibilityInstance::from_parts(manifold, target, start, centers, radius, slack, Some(seed))
}
