//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::DMatrix;

use crate::{Error, Result};

/// Singular values in decreasing order.
pub(crate) fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Number of singular values above `threshold`, and the smallest such value.
pub(crate) fn rank_above(svals: &[f64], threshold: f64) -> (usize, Option<f64>) {
    let kept: Vec<f64> = svals.iter().copied().filter(|&s| s > threshold).collect();
    (kept.len(), kept.last().copied())
}

/// `A^{-1/2}` for symmetric positive-definite `A`.
pub(crate) fn inverse_sqrt_spd(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !a.is_square() {
        return Err(Error::arg("metric must be a square matrix"));
    }
    let asym = (a - a.transpose()).abs().max();
    if asym > 1e-12 * a.abs().max().max(1.0) {
        return Err(Error::arg("metric must be symmetric"));
    }
    let eig = a.clone().symmetric_eigen();
    if eig.eigenvalues.iter().any(|&l| l <= 0.0) {
        return Err(Error::arg("metric must be positive definite"));
    }
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()));
    Ok(&eig.eigenvectors * d * eig.eigenvectors.transpose())
}

/// Solves `A X = B` by LU with partial pivoting.
pub(crate) fn solve(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    a.clone()
        .lu()
        .solve(b)
        .ok_or_else(|| Error::Consistency("singular matrix in linear solve".into()))
}
