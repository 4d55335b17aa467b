use nalgebra::DMatrix;

use super::{filtration, FiltrationReport, Frame};
use crate::free_lie::hall_basis;
use crate::linalg::solve;
use crate::scalar::Scalar;
use crate::{Error, Result};

/// `Γ_N(x) = B_ℋ(x)^{-1} B_N(x)` with its rescaled forms.
///
/// Rows are indexed by `ℋ` (in the order of `hall`), columns by `G(N)`.
#[derive(Clone, Debug)]
pub struct GammaPack {
    pub report: FiltrationReport,
    pub depth: usize,
    pub epsilon: f64,
    /// Positions of `ℋ` in `G(N)`.
    pub hall: Vec<usize>,
    /// Positions of `G(N) ∖ ℋ`, the index set of `P_N`.
    pub complement: Vec<usize>,
    pub gamma: DMatrix<f64>,
    /// Entries `ε^{|J|−|I|} γ^I_J`.
    pub gamma_eps: DMatrix<f64>,
    /// Entries `δ_{|I|,|J|} γ^I_J`.
    pub gamma_zero: DMatrix<f64>,
    /// `Δ^ℋ_ε = diag(ε^{|I|})`, `I ∈ ℋ`.
    pub delta_h: DMatrix<f64>,
}

impl GammaPack {
    pub fn det_delta_h(&self) -> f64 {
        self.delta_h.diagonal().product()
    }
}

/// `B_N(x) = (V^i_[I](x))`, `d` rows by `|G(N)|` columns.
pub fn b_matrix<T: Scalar>(frame: &Frame<T>, x: &[T], depth: usize) -> Result<Vec<Vec<T>>> {
    if x.len() != frame.dim() {
        return Err(Error::arg("point dimension does not match the frame"));
    }
    let fields = frame.hall_fields(depth)?;
    let cols: Vec<Vec<T>> = fields.iter().map(|v| v.eval(x)).collect();
    Ok((0..frame.dim())
        .map(|i| cols.iter().map(|c| c[i].clone()).collect())
        .collect())
}

/// Builds the `Γ` family at `x` for step `N >= N_0(x)` and checks its
/// structure: `γ^I_J = δ^I_J` on `ℋ`, `γ^I_J = 0` for `J ∈ G(N_0)` with
/// `|I| > |J|`, and `Γ_N Δ^N_ε = Δ^ℋ_ε Γ̃^ε_N`.
pub fn gamma_pack(
    frame: &Frame<f64>,
    x: &[f64],
    depth: usize,
    epsilon: f64,
    tol: f64,
) -> Result<GammaPack> {
    if !(epsilon > 0.0) {
        return Err(Error::arg("epsilon must be positive"));
    }
    let report = filtration(frame, x, depth, tol)?;
    let n0 = report.step.expect("certified");
    let basis = hall_basis(frame.n(), depth)?;
    let rows = b_matrix(frame, x, depth)?;
    let d = frame.dim();
    let bn = DMatrix::from_fn(d, basis.len(), |i, j| rows[i][j]);
    let hall = report.hall_indices.clone();
    let bh = report.b_h_matrix();
    let gamma = solve(&bh, &bn)?;

    let grade = |j: usize| basis.grade(j) as i32;
    let gamma_eps = DMatrix::from_fn(d, basis.len(), |r, j| {
        epsilon.powi(grade(j) - grade(hall[r])) * gamma[(r, j)]
    });
    let gamma_zero = DMatrix::from_fn(d, basis.len(), |r, j| {
        if grade(j) == grade(hall[r]) {
            gamma[(r, j)]
        } else {
            0.0
        }
    });
    let delta_h = DMatrix::from_fn(d, d, |r, c| {
        if r == c {
            epsilon.powi(grade(hall[r]))
        } else {
            0.0
        }
    });
    let complement = (0..basis.len()).filter(|j| !hall.contains(j)).collect();

    let scale = gamma.abs().max().max(1.0);
    let gam_tol = 1e-10 * scale;
    let n0_len = basis.dimension_through(n0);
    for (r, &hr) in hall.iter().enumerate() {
        for j in 0..basis.len() {
            let g = gamma[(r, j)];
            if let Some(c) = hall.iter().position(|&h| h == j) {
                let want = if c == r { 1.0 } else { 0.0 };
                if (g - want).abs() > gam_tol {
                    return Err(Error::Consistency(format!(
                        "γ on ℋ is not the identity (entry {r},{j} = {g:e})"
                    )));
                }
            } else if j < n0_len && grade(hr) > grade(j) && g.abs() > gam_tol {
                return Err(Error::Consistency(format!(
                    "γ^I_J = {g:e} for |I| > |J|; ℋ or the rank tolerance is inconsistent"
                )));
            }
        }
    }

    let dn = DMatrix::from_fn(basis.len(), basis.len(), |r, c| {
        if r == c {
            epsilon.powi(grade(r))
        } else {
            0.0
        }
    });
    let lhs = &gamma * dn;
    let rhs = &delta_h * &gamma_eps;
    let err = (&lhs - &rhs).abs().max();
    if err > 1e-12 * lhs.abs().max().max(1.0) {
        return Err(Error::Consistency(format!(
            "Γ_N Δ_ε ≠ Δ^ℋ_ε Γ̃^ε (difference {err:e})"
        )));
    }

    Ok(GammaPack {
        report,
        depth,
        epsilon,
        hall,
        complement,
        gamma,
        gamma_eps,
        gamma_zero,
        delta_h,
    })
}
