//! Matrix functions of symmetric matrices via spectral calculus.
//!
//! For a symmetric `X = Q diag(l) Q^T` and a scalar function `f`, the matrix
//! function is `f(X) = Q diag(f(l)) Q^T`. All SPD-manifold operations reduce
//! to this primitive with `f` among exp, ln, sqrt, and 1/sqrt.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::tolerances::{EIGENVALUE_FLOOR, POINT_TOLERANCE};

/// Largest absolute entry of `X - X^T`.
pub fn max_asymmetry(x: &DMatrix<f64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..x.nrows() {
        for j in (i + 1)..x.ncols() {
            worst = worst.max((x[(i, j)] - x[(j, i)]).abs());
        }
    }
    worst
}

/// Symmetric part `(X + X^T) / 2`.
pub fn symmetrize(x: &DMatrix<f64>) -> DMatrix<f64> {
    let mut s = x.clone();
    for i in 0..s.nrows() {
        for j in (i + 1)..s.ncols() {
            let avg = 0.5 * (s[(i, j)] + s[(j, i)]);
            s[(i, j)] = avg;
            s[(j, i)] = avg;
        }
    }
    s
}

fn require_square_symmetric(x: &DMatrix<f64>) -> Result<()> {
    if x.nrows() != x.ncols() {
        return Err(Error::DimensionMismatch {
            context: "spectral_apply",
            expected: format!("{0} x {0}", x.nrows()),
            found: format!("{} x {}", x.nrows(), x.ncols()),
        });
    }
    let asymmetry = max_asymmetry(x);
    if asymmetry > POINT_TOLERANCE {
        return Err(Error::NotSymmetric { asymmetry });
    }
    Ok(())
}

/// Applies a scalar function to a symmetric matrix through its
/// eigendecomposition and returns the symmetrized result.
///
/// When `floor` is given, every eigenvalue must lie strictly above it; this is
/// how `ln` and `sqrt` reject inputs outside (or on the boundary of) the SPD
/// cone instead of silently clamping them.
pub fn spectral_apply<F>(f: F, x: &DMatrix<f64>, floor: Option<f64>) -> Result<DMatrix<f64>>
where
    F: Fn(f64) -> f64,
{
    require_square_symmetric(x)?;
    let eig = symmetrize(x).symmetric_eigen();
    if let Some(floor) = floor {
        if let Some(min) = eig.eigenvalues.iter().cloned().reduce(f64::min) {
            if min < floor {
                return Err(Error::EigenvalueBelowFloor {
                    eigenvalue: min,
                    floor,
                });
            }
        }
    }
    let mapped = eig.eigenvalues.map(f);
    let scaled = &eig.eigenvectors * DMatrix::from_diagonal(&mapped);
    Ok(symmetrize(&(scaled * eig.eigenvectors.transpose())))
}

/// Matrix exponential of a symmetric matrix.
pub fn matrix_exp(x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    spectral_apply(f64::exp, x, None)
}

/// Matrix logarithm; requires eigenvalues above [`EIGENVALUE_FLOOR`].
pub fn matrix_log(x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    spectral_apply(f64::ln, x, Some(EIGENVALUE_FLOOR))
}

/// Matrix square root; requires eigenvalues above [`EIGENVALUE_FLOOR`].
pub fn matrix_sqrt(x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    spectral_apply(f64::sqrt, x, Some(EIGENVALUE_FLOOR))
}

/// Square root and inverse square root from a single eigendecomposition.
pub fn sqrt_and_inv_sqrt(x: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    require_square_symmetric(x)?;
    let eig = symmetrize(x).symmetric_eigen();
    if let Some(min) = eig.eigenvalues.iter().cloned().reduce(f64::min) {
        if min < EIGENVALUE_FLOOR {
            return Err(Error::EigenvalueBelowFloor {
                eigenvalue: min,
                floor: EIGENVALUE_FLOOR,
            });
        }
    }
    let roots = eig.eigenvalues.map(f64::sqrt);
    let q = &eig.eigenvectors;
    let sqrt = symmetrize(&(q * DMatrix::from_diagonal(&roots) * q.transpose()));
    let inv_roots = roots.map(|r| 1.0 / r);
    let inv_sqrt = symmetrize(&(q * DMatrix::from_diagonal(&inv_roots) * q.transpose()));
    Ok((sqrt, inv_sqrt))
}

/// Eigenvalues of a symmetric matrix (unordered), with the same floor check
/// as [`matrix_log`] when `floor` is given.
pub fn symmetric_eigenvalues(x: &DMatrix<f64>, floor: Option<f64>) -> Result<Vec<f64>> {
    require_square_symmetric(x)?;
    let vals = symmetrize(x).symmetric_eigenvalues();
    if let Some(floor) = floor {
        if let Some(min) = vals.iter().cloned().reduce(f64::min) {
            if min < floor {
                return Err(Error::EigenvalueBelowFloor {
                    eigenvalue: min,
                    floor,
                });
            }
        }
    }
    Ok(vals.iter().cloned().collect())
}
