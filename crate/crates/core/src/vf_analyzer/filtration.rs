use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::Frame;
use crate::free_lie::{hall_basis, Word};
use crate::linalg::{rank_above, singular_values};
use crate::{Error, Result};

/// Default relative singular-value threshold for numerical rank.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

/// Default largest bracket length tried by [`select_h`].
pub const DEFAULT_NMAX: usize = 8;

/// Hörmander filtration `A_1(x) ⊂ A_2(x) ⊂ ...` of a frame at a point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiltrationReport {
    pub point: Vec<f64>,
    pub dim: usize,
    /// `dim A_k(x)` for `k = 1, 2, ...` up to the step (or `nmax`).
    pub growth: Vec<usize>,
    pub certified: bool,
    /// Step `N_0(x)`, when certified.
    pub step: Option<usize>,
    /// `ν(x) = Σ k (dim A_k − dim A_{k−1})`, when certified.
    pub nu: Option<usize>,
    /// Selected Lyndon words `ℋ`, grade-ascending.
    pub hall_set: Vec<Vec<u32>>,
    /// Positions of `ℋ` in the Hall basis.
    pub hall_indices: Vec<usize>,
    /// `B_ℋ(x)`, row-major (`d` rows, one column per element of `ℋ`).
    pub b_h: Vec<Vec<f64>>,
    pub det_b_h: Option<f64>,
    /// Relative rank threshold: singular values `> tol·σ_max` count.
    pub tol: f64,
    /// Largest singular value of `B_k(x)` at each `k`.
    pub sigma_max: Vec<f64>,
    /// Smallest retained singular value of `B_k(x)` at each `k`.
    pub min_retained_sigma: Vec<Option<f64>>,
}

impl FiltrationReport {
    pub fn b_h_matrix(&self) -> DMatrix<f64> {
        let d = self.b_h.len();
        let m = self.b_h.first().map_or(0, Vec::len);
        DMatrix::from_fn(d, m, |i, j| self.b_h[i][j])
    }
}

/// Verdict of [`check_equiregular`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquiregularityReport {
    pub equiregular: bool,
    pub all_certified: bool,
    /// Index of the first point whose growth vector differs from point 0.
    pub first_disagreement: Option<usize>,
    pub reports: Vec<FiltrationReport>,
}

fn nu_of(growth: &[usize]) -> usize {
    let mut prev = 0;
    let mut nu = 0;
    for (k, &g) in growth.iter().enumerate() {
        nu += (k + 1) * (g - prev);
        prev = g;
    }
    nu
}

/// Computes the filtration at `x`, stopping at the first `k` with
/// `dim A_k(x) = d`, and selects `ℋ` greedily: grades ascending, Hall basis
/// order within a grade, keeping a column when it raises the numerical rank.
pub fn filtration(frame: &Frame<f64>, x: &[f64], nmax: usize, tol: f64) -> Result<FiltrationReport> {
    let d = frame.dim();
    if x.len() != d {
        return Err(Error::arg(format!("point has {} coordinates, frame lives on R^{d}", x.len())));
    }
    if nmax == 0 {
        return Err(Error::arg("nmax must be at least 1"));
    }
    if !(tol > 0.0) {
        return Err(Error::arg("rank tolerance must be positive"));
    }
    let mut basis = hall_basis(frame.n(), 1)?;

    let mut columns: Vec<Vec<f64>> = Vec::new();
    let mut selected: Vec<usize> = Vec::new();
    let mut report = FiltrationReport {
        point: x.to_vec(),
        dim: d,
        growth: Vec::new(),
        certified: false,
        step: None,
        nu: None,
        hall_set: Vec::new(),
        hall_indices: Vec::new(),
        b_h: Vec::new(),
        det_b_h: None,
        tol,
        sigma_max: Vec::new(),
        min_retained_sigma: Vec::new(),
    };
    let as_matrix = |idx: &[usize], cols: &Vec<Vec<f64>>| {
        DMatrix::from_fn(d, idx.len(), |i, j| cols[idx[j]][i])
    };

    for k in 1..=nmax {
        // Extend one grade at a time so large alphabets only pay for what they use.
        basis = hall_basis(frame.n(), k)?;
        for i in basis.grade_range(k) {
            let v = frame.bracket_word(basis.word(i))?;
            columns.push(v.eval_f64(x));
        }
        let all: Vec<usize> = (0..columns.len()).collect();
        let svals = singular_values(&as_matrix(&all, &columns));
        let smax = svals.first().copied().unwrap_or(0.0);
        let threshold = tol * smax;
        let (rank, smallest) = if smax > 0.0 {
            rank_above(&svals, threshold)
        } else {
            (0, None)
        };
        for i in basis.grade_range(k) {
            if selected.len() >= rank {
                break;
            }
            let mut trial = selected.clone();
            trial.push(i);
            let s = singular_values(&as_matrix(&trial, &columns));
            if rank_above(&s, threshold).0 > selected.len() {
                selected = trial;
            }
        }
        if selected.len() != rank {
            return Err(Error::Consistency(format!(
                "greedy selection found {} independent brackets at step {k}, SVD rank is {rank}; \
                 the rank tolerance {tol:e} sits on a near-degeneracy",
                selected.len()
            )));
        }
        report.growth.push(rank);
        report.sigma_max.push(smax);
        report.min_retained_sigma.push(smallest);
        if rank == d {
            report.certified = true;
            report.step = Some(k);
            report.nu = Some(nu_of(&report.growth));
            break;
        }
    }

    report.hall_set = selected
        .iter()
        .map(|&i| basis.word(i).letters().to_vec())
        .collect();
    report.hall_indices = selected.clone();
    let bh = as_matrix(&selected, &columns);
    report.b_h = (0..d)
        .map(|i| (0..selected.len()).map(|j| bh[(i, j)]).collect())
        .collect();
    if report.certified {
        report.det_b_h = Some(bh.determinant());
        Ok(report)
    } else {
        Err(Error::HormanderNotCertified {
            max_step: nmax,
            report: Box::new(report),
        })
    }
}

/// Runs [`filtration`] at every point; equiregular iff all growth vectors agree.
pub fn check_equiregular(
    frame: &Frame<f64>,
    points: &[Vec<f64>],
    nmax: usize,
    tol: f64,
) -> Result<EquiregularityReport> {
    if points.is_empty() {
        return Err(Error::arg("no points to check"));
    }
    let mut reports = Vec::with_capacity(points.len());
    for x in points {
        match filtration(frame, x, nmax, tol) {
            Ok(r) => reports.push(r),
            Err(Error::HormanderNotCertified { report, .. }) => reports.push(*report),
            Err(e) => return Err(e),
        }
    }
    let first_disagreement = reports
        .iter()
        .position(|r| r.growth != reports[0].growth);
    Ok(EquiregularityReport {
        equiregular: first_disagreement.is_none(),
        all_certified: reports.iter().all(|r| r.certified),
        first_disagreement,
        reports,
    })
}

/// `ℋ(x)` and `B_ℋ(x)`.
pub fn select_h(frame: &Frame<f64>, x: &[f64], tol: f64) -> Result<(Vec<Word>, DMatrix<f64>)> {
    let report = filtration(frame, x, DEFAULT_NMAX, tol)?;
    let words = report
        .hall_set
        .iter()
        .map(|w| Word::new(w.clone(), frame.n()))
        .collect::<Result<Vec<_>>>()?;
    Ok((words, report.b_h_matrix()))
}
