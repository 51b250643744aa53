//! Affine-invariant geometry of the SPD cone `P(n)`.
//!
//! Points are symmetric positive-definite `n x n` matrices, tangent vectors
//! are symmetric matrices, and the metric at `X` is
//! `<U, V>_X = tr(V X^{-1} U X^{-1})`. The geodesic maps are
//!
//! ```text
//! exp_X(V) = X^{1/2} expm(X^{-1/2} V X^{-1/2}) X^{1/2}
//! log_X(Y) = X^{1/2} logm(X^{-1/2} Y X^{-1/2}) X^{1/2}
//! d(X, Y)  = |logm(X^{-1/2} Y X^{-1/2})|_F
//! ```
//!
//! Every result of exp/log is symmetrized to keep round-off from drifting the
//! iterates away from the symmetric cone.

use nalgebra::DMatrix;

use crate::error::Result;
use crate::geometry::spectral::{
    matrix_exp, matrix_log, spectral_apply, sqrt_and_inv_sqrt, symmetric_eigenvalues, symmetrize,
};
use crate::tolerances::EIGENVALUE_FLOOR;

/// Exponential map at `x` applied to the symmetric tangent `v`.
pub fn exp(x: &DMatrix<f64>, v: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (sqrt, inv_sqrt) = sqrt_and_inv_sqrt(x)?;
    let whitened = symmetrize(&(&inv_sqrt * v * &inv_sqrt));
    let grown = matrix_exp(&whitened)?;
    Ok(symmetrize(&(&sqrt * grown * &sqrt)))
}

/// Logarithm map at `x` pointing toward `y`.
pub fn log(x: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (sqrt, inv_sqrt) = sqrt_and_inv_sqrt(x)?;
    let whitened = symmetrize(&(&inv_sqrt * y * &inv_sqrt));
    let shrunk = matrix_log(&whitened)?;
    Ok(symmetrize(&(&sqrt * shrunk * &sqrt)))
}

/// Affine-invariant distance via the generalized eigenvalues of `(y, x)`.
pub fn dist(x: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<f64> {
    let (_, inv_sqrt) = sqrt_and_inv_sqrt(x)?;
    let whitened = symmetrize(&(&inv_sqrt * y * &inv_sqrt));
    let eigenvalues = symmetric_eigenvalues(&whitened, Some(EIGENVALUE_FLOOR))?;
    Ok(eigenvalues
        .iter()
        .map(|l| l.ln().powi(2))
        .sum::<f64>()
        .sqrt())
}

/// Metric inner product `tr(u x^{-1} v x^{-1})` of two symmetric tangents.
pub fn inner(x: &DMatrix<f64>, u: &DMatrix<f64>, v: &DMatrix<f64>) -> Result<f64> {
    let inv = spectral_apply(|l| 1.0 / l, x, Some(EIGENVALUE_FLOOR))?;
    let a = &inv * u;
    let b = &inv * v;
    // tr((x^{-1} u)(x^{-1} v)) with both factors similar to symmetric
    // matrices; accumulate the trace without forming the product.
    let mut trace = 0.0;
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            trace += a[(i, k)] * b[(k, i)];
        }
    }
    Ok(trace)
}
