//! Manifold handles, points, tangent vectors, and the geometric primitives
//! shared by the rest of the crate.
//!
//! Two manifolds are supported: the unit sphere `S^{n-1}` (curvature +1,
//! injectivity radius pi) and the SPD cone `P(n)` with the affine-invariant
//! metric (nonpositive curvature, infinite injectivity radius). A
//! [`ManifoldHandle`] carries the ambient size together with the curvature
//! data that the step-size rules and complexity bounds consume:
//!
//! * `curvature_lower` — the lower bound `kappa <= 0` used by the bounds
//!   (the sphere reports 0; the SPD cone defaults to -1/2),
//! * `curvature_upper` — the upper bound `K` entering the safety radius,
//! * `injectivity_radius` — below which geodesics between points are unique.
//!
//! The *safety radius* `rho = min(inj M, pi / (2 sqrt(K))) / 2` bounds the
//! ball radius within which distance functions to centers stay geodesically
//! convex, which is what the feasibility generators rely on.

pub mod spd;
pub mod spectral;
pub mod sphere;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::tolerances::{EIGENVALUE_FLOOR, POINT_TOLERANCE};

/// Which manifold a handle describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ManifoldKind {
    /// Unit sphere `S^{n-1}` in `R^n`.
    Sphere,
    /// Symmetric positive-definite `n x n` matrices, affine-invariant metric.
    Spd,
}

impl std::fmt::Display for ManifoldKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ManifoldKind::Sphere => write!(f, "sphere"),
            ManifoldKind::Spd => write!(f, "spd"),
        }
    }
}

/// A point on a manifold. Sphere points are `n x 1` unit columns; SPD points
/// are symmetric positive-definite `n x n` matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    coords: DMatrix<f64>,
}

impl Point {
    pub(crate) fn unchecked(coords: DMatrix<f64>) -> Self {
        Point { coords }
    }

    /// Raw coordinates (ambient vector as a one-column matrix, or the full
    /// symmetric matrix).
    pub fn coords(&self) -> &DMatrix<f64> {
        &self.coords
    }
}

/// A tangent vector anchored at a base point.
#[derive(Clone, Debug, PartialEq)]
pub struct Tangent {
    base: Point,
    direction: DMatrix<f64>,
}

impl Tangent {
    pub(crate) fn unchecked(base: Point, direction: DMatrix<f64>) -> Self {
        Tangent { base, direction }
    }

    pub fn base(&self) -> &Point {
        &self.base
    }

    pub fn direction(&self) -> &DMatrix<f64> {
        &self.direction
    }

    /// The same tangent scaled by `a` (tangent spaces are linear).
    pub fn scaled(&self, a: f64) -> Tangent {
        Tangent {
            base: self.base.clone(),
            direction: &self.direction * a,
        }
    }

    /// True when every coordinate is exactly zero.
    pub fn is_zero(&self) -> bool {
        self.direction.iter().all(|x| *x == 0.0)
    }
}

/// Safety radius `min(inj, pi / (2 sqrt(K))) / 2` for an upper curvature
/// bound `K` (nonpositive `K` contributes no cap) and an injectivity radius.
pub fn safety_radius_from(curvature_upper: f64, injectivity_radius: f64) -> f64 {
    let curvature_cap = if curvature_upper > 0.0 {
        std::f64::consts::PI / (2.0 * curvature_upper.sqrt())
    } else {
        f64::INFINITY
    };
    0.5 * injectivity_radius.min(curvature_cap)
}

/// Metadata describing one of the two supported manifolds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ManifoldHandle {
    kind: ManifoldKind,
    n: usize,
    curvature_lower: f64,
    curvature_upper: f64,
    injectivity_radius: f64,
}

impl ManifoldHandle {
    /// Unit sphere `S^{n-1}` in `R^n`, `n >= 2`. Reports curvature lower
    /// bound 0 (the flat limits of the complexity constants apply), upper
    /// bound 1, injectivity radius pi.
    pub fn sphere(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter {
                name: "n",
                message: format!("sphere needs ambient dimension >= 2, got {n}"),
            });
        }
        Ok(ManifoldHandle {
            kind: ManifoldKind::Sphere,
            n,
            curvature_lower: 0.0,
            curvature_upper: 1.0,
            injectivity_radius: std::f64::consts::PI,
        })
    }

    /// SPD cone of `n x n` matrices with the default curvature lower bound
    /// -1/2 (attained on 2x2 blocks; valid for every `n`).
    pub fn spd(n: usize) -> Result<Self> {
        Self::spd_with_curvature_bound(n, -0.5)
    }

    /// SPD cone with an explicit curvature lower bound `kappa <= 0` for
    /// callers that prefer a different (still valid) bound in the constants.
    pub fn spd_with_curvature_bound(n: usize, kappa: f64) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidParameter {
                name: "n",
                message: "SPD cone needs n >= 1".to_string(),
            });
        }
        if !kappa.is_finite() || kappa > 0.0 {
            return Err(Error::InvalidParameter {
                name: "kappa",
                message: format!("curvature lower bound must be finite and <= 0, got {kappa}"),
            });
        }
        Ok(ManifoldHandle {
            kind: ManifoldKind::Spd,
            n,
            curvature_lower: kappa,
            curvature_upper: 0.0,
            injectivity_radius: f64::INFINITY,
        })
    }

    pub fn kind(&self) -> ManifoldKind {
        self.kind
    }

    /// Ambient size: vectors in `R^n` for the sphere, `n x n` matrices for
    /// the SPD cone.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Curvature lower bound `kappa <= 0` consumed by step rules and bounds.
    pub fn curvature_lower(&self) -> f64 {
        self.curvature_lower
    }

    /// Curvature upper bound `K` entering the safety radius.
    pub fn curvature_upper(&self) -> f64 {
        self.curvature_upper
    }

    pub fn injectivity_radius(&self) -> f64 {
        self.injectivity_radius
    }

    /// Safety radius of this manifold: pi/4 on the sphere, infinite on the
    /// SPD cone.
    pub fn safety_radius(&self) -> f64 {
        safety_radius_from(self.curvature_upper, self.injectivity_radius)
    }

    fn expected_shape(&self) -> (usize, usize) {
        match self.kind {
            ManifoldKind::Sphere => (self.n, 1),
            ManifoldKind::Spd => (self.n, self.n),
        }
    }

    fn check_shape(&self, coords: &DMatrix<f64>, context: &'static str) -> Result<()> {
        let (rows, cols) = self.expected_shape();
        if coords.nrows() != rows || coords.ncols() != cols {
            return Err(Error::DimensionMismatch {
                context,
                expected: format!("{rows} x {cols}"),
                found: format!("{} x {}", coords.nrows(), coords.ncols()),
            });
        }
        Ok(())
    }

    /// Validates coordinates and wraps them into a [`Point`].
    ///
    /// Sphere: unit norm within [`POINT_TOLERANCE`]. SPD: symmetry within
    /// [`POINT_TOLERANCE`] and eigenvalues at or above [`EIGENVALUE_FLOOR`].
    pub fn point(&self, coords: DMatrix<f64>) -> Result<Point> {
        self.check_shape(&coords, "point")?;
        match self.kind {
            ManifoldKind::Sphere => {
                let defect = (coords.norm() - 1.0).abs();
                if defect > POINT_TOLERANCE {
                    return Err(Error::PointOffManifold {
                        detail: format!("unit-norm defect {defect:.3e} exceeds {POINT_TOLERANCE:.1e}"),
                    });
                }
            }
            ManifoldKind::Spd => {
                let asymmetry = spectral::max_asymmetry(&coords);
                if asymmetry > POINT_TOLERANCE {
                    return Err(Error::NotSymmetric { asymmetry });
                }
                let eigenvalues = spectral::symmetric_eigenvalues(&coords, None)?;
                let min = eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
                if min < EIGENVALUE_FLOOR {
                    return Err(Error::EigenvalueBelowFloor {
                        eigenvalue: min,
                        floor: EIGENVALUE_FLOOR,
                    });
                }
            }
        }
        Ok(Point::unchecked(coords))
    }

    /// Validates a direction against the tangent-space constraint at `base`
    /// and wraps it into a [`Tangent`].
    pub fn tangent(&self, base: &Point, direction: DMatrix<f64>) -> Result<Tangent> {
        self.check_shape(&direction, "tangent")?;
        self.check_shape(base.coords(), "tangent base")?;
        match self.kind {
            ManifoldKind::Sphere => {
                let overlap = sphere::dot(base.coords(), &direction).abs();
                if overlap > POINT_TOLERANCE {
                    return Err(Error::InvalidTangent {
                        detail: format!(
                            "component along the base point {overlap:.3e} exceeds {POINT_TOLERANCE:.1e}"
                        ),
                    });
                }
            }
            ManifoldKind::Spd => {
                let asymmetry = spectral::max_asymmetry(&direction);
                if asymmetry > POINT_TOLERANCE {
                    return Err(Error::NotSymmetric { asymmetry });
                }
            }
        }
        Ok(Tangent::unchecked(base.clone(), direction))
    }

    /// The zero vector of the tangent space at `base`.
    pub fn zero_tangent(&self, base: &Point) -> Tangent {
        let (rows, cols) = self.expected_shape();
        Tangent::unchecked(base.clone(), DMatrix::zeros(rows, cols))
    }

    fn ensure_same_base(p: &Point, v: &Tangent) -> Result<()> {
        if p.coords().shape() != v.base().coords().shape() {
            return Err(Error::BaseMismatch);
        }
        let drift = (p.coords() - v.base().coords()).abs().max();
        if drift > 1e-12 {
            return Err(Error::BaseMismatch);
        }
        Ok(())
    }

    /// Exponential map: follows the geodesic from `p` with initial velocity
    /// `v` for unit time.
    pub fn exp(&self, p: &Point, v: &Tangent) -> Result<Point> {
        Self::ensure_same_base(p, v)?;
        match self.kind {
            ManifoldKind::Sphere => Ok(Point::unchecked(sphere::exp(p.coords(), v.direction()))),
            ManifoldKind::Spd => Ok(Point::unchecked(spd::exp(p.coords(), v.direction())?)),
        }
    }

    /// Logarithm map: the initial velocity of the minimizing geodesic from
    /// `p` to `q`, satisfying `|log(p, q)| = d(p, q)` and
    /// `exp(p, log(p, q)) = q`. Coincident points give the zero tangent.
    pub fn log(&self, p: &Point, q: &Point) -> Result<Tangent> {
        self.check_shape(q.coords(), "log target")?;
        match self.kind {
            ManifoldKind::Sphere => Ok(Tangent::unchecked(
                p.clone(),
                sphere::log(p.coords(), q.coords())?,
            )),
            ManifoldKind::Spd => Ok(Tangent::unchecked(
                p.clone(),
                spd::log(p.coords(), q.coords())?,
            )),
        }
    }

    /// Geodesic distance between two points.
    pub fn dist(&self, p: &Point, q: &Point) -> Result<f64> {
        self.check_shape(p.coords(), "dist")?;
        self.check_shape(q.coords(), "dist")?;
        match self.kind {
            ManifoldKind::Sphere => Ok(sphere::dist(p.coords(), q.coords())),
            ManifoldKind::Spd => spd::dist(p.coords(), q.coords()),
        }
    }

    /// Riemannian inner product of two tangents anchored at `p`.
    pub fn inner(&self, p: &Point, u: &Tangent, v: &Tangent) -> Result<f64> {
        Self::ensure_same_base(p, u)?;
        Self::ensure_same_base(p, v)?;
        match self.kind {
            ManifoldKind::Sphere => Ok(sphere::dot(u.direction(), v.direction())),
            ManifoldKind::Spd => spd::inner(p.coords(), u.direction(), v.direction()),
        }
    }

    /// Riemannian norm of a tangent at `p`.
    pub fn norm(&self, p: &Point, v: &Tangent) -> Result<f64> {
        Ok(self.inner(p, v, v)?.max(0.0).sqrt())
    }

    /// A uniformly random direction of unit Riemannian norm at `p`, built
    /// from Gaussian samples (projected onto the tangent plane on the sphere,
    /// symmetrized on the SPD cone).
    pub fn random_unit_tangent<R: Rng + ?Sized>(&self, p: &Point, rng: &mut R) -> Result<Tangent> {
        self.check_shape(p.coords(), "random_unit_tangent")?;
        loop {
            let direction = match self.kind {
                ManifoldKind::Sphere => {
                    let gauss = DMatrix::from_fn(self.n, 1, |_, _| StandardNormal.sample(rng));
                    sphere::project_tangent(p.coords(), &gauss)
                }
                ManifoldKind::Spd => {
                    let gauss = DMatrix::from_fn(self.n, self.n, |_, _| StandardNormal.sample(rng));
                    spectral::symmetrize(&gauss)
                }
            };
            let candidate = Tangent::unchecked(p.clone(), direction);
            let norm = self.norm(p, &candidate)?;
            if norm > 1e-8 {
                return Ok(candidate.scaled(1.0 / norm));
            }
            // Degenerate draw (measure zero); sample again.
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sphere_handle_reports_its_curvature_data() {
        let m = ManifoldHandle::sphere(3).unwrap();
        assert_eq!(m.curvature_lower(), 0.0);
        assert_eq!(m.curvature_upper(), 1.0);
        assert_eq!(m.injectivity_radius(), std::f64::consts::PI);
        assert_relative_eq!(m.safety_radius(), std::f64::consts::FRAC_PI_4);
    }

    #[test]
    fn spd_handle_defaults_to_minus_half_curvature() {
        let m = ManifoldHandle::spd(10).unwrap();
        assert_eq!(m.curvature_lower(), -0.5);
        assert_eq!(m.curvature_upper(), 0.0);
        assert!(m.injectivity_radius().is_infinite());
        assert!(m.safety_radius().is_infinite());
    }

    #[test]
    fn safety_radius_caps_at_the_curvature_scale() {
        // K = 4 halves the curvature cap pi / (2 sqrt(K)) = pi / 4,
        // so the safety radius is pi / 8 even with infinite injectivity.
        let rho = safety_radius_from(4.0, f64::INFINITY);
        assert_relative_eq!(rho, std::f64::consts::PI / 8.0);
    }

    #[test]
    fn sphere_point_validation_rejects_off_sphere_vectors() {
        let m = ManifoldHandle::sphere(2).unwrap();
        let bad = DMatrix::from_column_slice(2, 1, &[1.0, 1.0]);
        assert!(matches!(m.point(bad), Err(Error::PointOffManifold { .. })));
        let good = DMatrix::from_column_slice(2, 1, &[0.0, 1.0]);
        assert!(m.point(good).is_ok());
    }

    #[test]
    fn spd_point_validation_enforces_definiteness() {
        let m = ManifoldHandle::spd(2).unwrap();
        let indefinite = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(
            m.point(indefinite),
            Err(Error::EigenvalueBelowFloor { .. })
        ));
    }

    #[test]
    fn tangent_validation_enforces_orthogonality_on_sphere() {
        let m = ManifoldHandle::sphere(2).unwrap();
        let p = m
            .point(DMatrix::from_column_slice(2, 1, &[1.0, 0.0]))
            .unwrap();
        let radial = DMatrix::from_column_slice(2, 1, &[0.5, 0.0]);
        assert!(matches!(
            m.tangent(&p, radial),
            Err(Error::InvalidTangent { .. })
        ));
    }

    #[test]
    fn exp_rejects_a_tangent_from_another_base() {
        let m = ManifoldHandle::sphere(3).unwrap();
        let p = m
            .point(DMatrix::from_column_slice(3, 1, &[1.0, 0.0, 0.0]))
            .unwrap();
        let q = m
            .point(DMatrix::from_column_slice(3, 1, &[0.0, 1.0, 0.0]))
            .unwrap();
        let v = m
            .tangent(&q, DMatrix::from_column_slice(3, 1, &[0.0, 0.0, 0.3]))
            .unwrap();
        assert!(matches!(m.exp(&p, &v), Err(Error::BaseMismatch)));
    }

    #[test]
    fn random_unit_tangent_is_unit_and_reproducible() {
        for handle in [ManifoldHandle::sphere(5).unwrap(), ManifoldHandle::spd(3).unwrap()] {
            let p = match handle.kind() {
                ManifoldKind::Sphere => {
                    let mut coords = DMatrix::zeros(5, 1);
                    coords[(0, 0)] = 1.0;
                    handle.point(coords).unwrap()
                }
                ManifoldKind::Spd => handle.point(DMatrix::identity(3, 3)).unwrap(),
            };
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            let v = handle.random_unit_tangent(&p, &mut rng).unwrap();
            assert_relative_eq!(handle.norm(&p, &v).unwrap(), 1.0, epsilon = 1e-12);
            let mut rng_again = ChaCha8Rng::seed_from_u64(7);
            let v_again = handle.random_unit_tangent(&p, &mut rng_again).unwrap();
            assert_eq!(v, v_again);
        }
    }

    #[test]
    fn log_round_trip_on_both_manifolds() {
        let sphere = ManifoldHandle::sphere(4).unwrap();
        let p = sphere
            .point(DMatrix::from_column_slice(4, 1, &[1.0, 0.0, 0.0, 0.0]))
            .unwrap();
        let q = sphere
            .point(DMatrix::from_column_slice(
                4,
                1,
                &[0.5, 0.5, 0.5, 0.5],
            ))
            .unwrap();
        let v = sphere.log(&p, &q).unwrap();
        assert_relative_eq!(
            sphere.norm(&p, &v).unwrap(),
            sphere.dist(&p, &q).unwrap(),
            epsilon = 1e-12
        );
        let back = sphere.exp(&p, &v).unwrap();
        assert_relative_eq!(back.coords(), q.coords(), epsilon = 1e-12);

        let spd = ManifoldHandle::spd(2).unwrap();
        let x = spd
            .point(DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]))
            .unwrap();
        let y = spd
            .point(DMatrix::from_row_slice(2, 2, &[1.0, -0.2, -0.2, 3.0]))
            .unwrap();
        let w = spd.log(&x, &y).unwrap();
        assert_relative_eq!(
            spd.norm(&x, &w).unwrap(),
            spd.dist(&x, &y).unwrap(),
            epsilon = 1e-11
        );
        let back = spd.exp(&x, &w).unwrap();
        assert_relative_eq!(back.coords(), y.coords(), epsilon = 1e-10);
    }
}
