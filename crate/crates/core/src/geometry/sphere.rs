//! Closed-form geometry of the unit sphere `S^{n-1}` in `R^n`.
//!
//! Points are unit column vectors, tangent vectors at `x` are vectors
//! orthogonal to `x`, and the metric is the restriction of the Euclidean
//! inner product. Geodesics are great circles:
//!
//! ```text
//! exp_x(v) = cos(|v|) x + sin(|v|) v / |v|
//! log_x(y) = (theta / sin theta) (y - <x,y> x),   theta = arccos <x,y>
//! d(x, y)  = arccos <x,y>
//! ```
//!
//! Coordinates are carried as `n x 1` matrices so the two manifolds share one
//! ambient representation.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::tolerances::ANTIPODE_GUARD;

/// Inner product of the ambient coordinates (Euclidean dot product).
pub fn dot(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.dot(b)
}

/// Clamped cosine of the angle between two unit vectors. Values outside
/// `[-1, 1]` by round-off are clamped; the antipodal guard is the caller's
/// concern because `dist` tolerates the antipode while `log` does not.
fn cos_angle(x: &DMatrix<f64>, y: &DMatrix<f64>) -> f64 {
    dot(x, y).clamp(-1.0, 1.0)
}

/// Geodesic distance `arccos <x,y>` in `[0, pi]`.
pub fn dist(x: &DMatrix<f64>, y: &DMatrix<f64>) -> f64 {
    cos_angle(x, y).acos()
}

/// Exponential map. The zero tangent returns the base point; otherwise the
/// output is renormalized to keep the unit-norm invariant tight under
/// repeated stepping.
pub fn exp(x: &DMatrix<f64>, v: &DMatrix<f64>) -> DMatrix<f64> {
    let speed = v.norm();
    if speed == 0.0 {
        return x.clone();
    }
    let mut out = x * speed.cos() + v * (speed.sin() / speed);
    let norm = out.norm();
    if norm > 0.0 {
        out /= norm;
    }
    out
}

/// Logarithm map. Errors within `ANTIPODE_GUARD` of the antipode, where the
/// minimizing great circle is not unique; returns the zero vector at
/// coincident points.
pub fn log(x: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let raw = dot(x, y);
    if raw < -1.0 + ANTIPODE_GUARD {
        return Err(Error::NearAntipode { inner: raw });
    }
    let c = raw.clamp(-1.0, 1.0);
    let theta = c.acos();
    // Project y onto the tangent plane at x and rescale to length theta so
    // that |log(x, y)| = d(x, y) holds to round-off.
    let u = y - x * c;
    let len = u.norm();
    if theta == 0.0 || len == 0.0 {
        return Ok(DMatrix::zeros(x.nrows(), 1));
    }
    Ok(u * (theta / len))
}

/// Orthogonal projection of an ambient vector onto the tangent plane at `x`.
pub fn project_tangent(x: &DMatrix<f64>, z: &DMatrix<f64>) -> DMatrix<f64> {
    z - x * dot(x, z)
}
