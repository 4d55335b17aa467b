//! Step-two nilpotent Lie groups `G ≅ R^{n+p}` and their heat kernels.
//!
//! Matrix functions of a skew matrix `Ξ` go through the symmetric
//! eigendecomposition of `−Ξ²`, which keeps everything real.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::leading::{quad_decay, QuadOptions, QuadResult};
use crate::vf_analyzer::{Frame, PolyVectorField, Polynomial};
use crate::{Error, Result};

/// Structure constants `C^k_{ij}` of a step-two nilpotent Lie algebra:
/// `[X_i, X_j] = Σ_k C^k_{ij} Z_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureConstants {
    n: usize,
    c: Vec<DMatrix<f64>>,
}

impl StructureConstants {
    /// Validates shapes and antisymmetry (rank is checked where it matters).
    pub fn new(n: usize, c: Vec<DMatrix<f64>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::arg("step-two groups need n >= 1"));
        }
        for (k, m) in c.iter().enumerate() {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::arg(format!(
                    "C^{} is {}x{}, expected {n}x{n}",
                    k + 1,
                    m.nrows(),
                    m.ncols()
                )));
            }
            let asym = (m + m.transpose()).abs().max();
            if asym > 1e-12 * m.abs().max().max(1.0) {
                return Err(Error::arg(format!("C^{} is not antisymmetric", k + 1)));
            }
        }
        Ok(StructureConstants { n, c })
    }

    /// Heisenberg algebra, `C^1_{12} = 1`.
    pub fn heisenberg() -> Self {
        Self::new(2, vec![rotation(2, 0, 1, 1.0)]).unwrap()
    }

    /// `blocks` orthogonal Heisenberg blocks, `n = 2·blocks`, `p = blocks`.
    pub fn heisenberg_blocks(blocks: usize) -> Self {
        let n = 2 * blocks;
        let c = (0..blocks).map(|b| rotation(n, 2 * b, 2 * b + 1, 1.0)).collect();
        Self::new(n, c).unwrap()
    }

    /// The abelian group `R^n`.
    pub fn abelian(n: usize) -> Self {
        Self::new(n, Vec::new()).unwrap()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.c.len()
    }

    pub fn matrices(&self) -> &[DMatrix<f64>] {
        &self.c
    }

    /// `ζ·C = Σ_k ζ_k C^k`.
    pub fn contract(&self, zeta: &[f64]) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.n, self.n);
        for (z, m) in zeta.iter().zip(&self.c) {
            out += m * *z;
        }
        out
    }

    /// Rank of the `p × n(n−1)/2` matrix of upper-triangular entries.
    pub fn rank(&self) -> usize {
        if self.c.is_empty() {
            return 0;
        }
        let cols: Vec<(usize, usize)> = (0..self.n)
            .flat_map(|i| (i + 1..self.n).map(move |j| (i, j)))
            .collect();
        if cols.is_empty() {
            return 0;
        }
        let m = DMatrix::from_fn(self.p(), cols.len(), |k, c| self.c[k][cols[c]]);
        let s = crate::linalg::singular_values(&m);
        let smax = s.first().copied().unwrap_or(0.0);
        s.iter().filter(|&&v| v > 1e-12 * smax).count()
    }

    /// Errors unless the structure constants have full rank `p`.
    pub fn ensure_full_rank(&self) -> Result<()> {
        let r = self.rank();
        if r < self.p() {
            return Err(Error::Divergent(format!(
                "structure constants have rank {r} < p = {}; the Fourier integrand does not \
                 decay along the kernel",
                self.p()
            )));
        }
        Ok(())
    }

    /// `C^k ↦ Qᵀ C^k Q` for orthogonal `Q` (change of orthonormal frame).
    pub fn conjugated(&self, q: &DMatrix<f64>) -> Result<Self> {
        Self::new(self.n, self.c.iter().map(|m| q.transpose() * m * q).collect())
    }

    /// `C^k ↦ Σ_l P_{kl} C^l` (change of basis of the centre).
    pub fn rebased(&self, p: &DMatrix<f64>) -> Result<Self> {
        if p.nrows() != self.p() || p.ncols() != self.p() {
            return Err(Error::arg("basis change must be p x p"));
        }
        let c = (0..self.p())
            .map(|k| {
                let mut m = DMatrix::zeros(self.n, self.n);
                for l in 0..self.p() {
                    m += &self.c[l] * p[(k, l)];
                }
                m
            })
            .collect();
        Self::new(self.n, c)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::new(self.n, self.c.iter().map(|m| m * s).collect()).unwrap()
    }
}

/// `n×n` matrix with `+a` at `(i,j)` and `−a` at `(j,i)`.
pub fn rotation(n: usize, i: usize, j: usize, a: f64) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    m[(i, j)] = a;
    m[(j, i)] = -a;
    m
}

/// Point `(x, z) ∈ R^n × R^p`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupPoint {
    pub x: Vec<f64>,
    pub z: Vec<f64>,
}

impl GroupPoint {
    pub fn new(x: Vec<f64>, z: Vec<f64>) -> Self {
        GroupPoint { x, z }
    }

    pub fn identity(c: &StructureConstants) -> Self {
        GroupPoint {
            x: vec![0.0; c.n()],
            z: vec![0.0; c.p()],
        }
    }

    fn check(&self, c: &StructureConstants) -> Result<()> {
        if self.x.len() != c.n() || self.z.len() != c.p() {
            return Err(Error::arg(format!(
                "group point has shape ({}, {}), expected ({}, {})",
                self.x.len(),
                self.z.len(),
                c.n(),
                c.p()
            )));
        }
        Ok(())
    }
}

/// `(x,z)×(u,v) = (x+u, z+v+½Σ x_i u_j C_ij)`.
pub fn group_mul(a: &GroupPoint, b: &GroupPoint, c: &StructureConstants) -> Result<GroupPoint> {
    a.check(c)?;
    b.check(c)?;
    let x = a.x.iter().zip(&b.x).map(|(p, q)| p + q).collect();
    let ax = DVector::from_column_slice(&a.x);
    let bx = DVector::from_column_slice(&b.x);
    let z = (0..c.p())
        .map(|k| a.z[k] + b.z[k] + 0.5 * ax.dot(&(&c.c[k] * &bx)))
        .collect();
    Ok(GroupPoint { x, z })
}

/// `(x,z)^{-1} = (−x, −z)`.
pub fn group_inv(a: &GroupPoint, c: &StructureConstants) -> Result<GroupPoint> {
    a.check(c)?;
    Ok(GroupPoint {
        x: a.x.iter().map(|v| -v).collect(),
        z: a.z.iter().map(|v| -v).collect(),
    })
}

/// Left-invariant frame `X̃_i = ∂_{x_i} + ½ Σ_{j,k} x_j C^k_{ji} ∂_{z_k}` on `R^{n+p}`.
pub fn left_invariant_frame(c: &StructureConstants) -> Frame<f64> {
    let (n, p) = (c.n(), c.p());
    let d = n + p;
    let fields = (0..n)
        .map(|i| {
            let mut comps = vec![Polynomial::zero(d); d];
            comps[i] = Polynomial::constant(d, 1.0);
            for k in 0..p {
                let mut poly = Polynomial::zero(d);
                for j in 0..n {
                    let a = c.c[k][(j, i)];
                    if a != 0.0 {
                        poly = poly.add(&Polynomial::var(d, j).scale(&(0.5 * a)));
                    }
                }
                comps[n + k] = poly;
            }
            PolyVectorField::new(comps).unwrap()
        })
        .collect();
    Frame::new(fields).unwrap()
}

/// Spectral data of `−Ξ²` for a skew matrix `Ξ`.
#[derive(Clone, Debug)]
pub struct SkewSpectral {
    pub xi: DMatrix<f64>,
    /// Eigenvalues of `−Ξ²`, clamped at zero.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors (columns).
    pub eigenvectors: DMatrix<f64>,
}

impl SkewSpectral {
    pub fn new(xi: &DMatrix<f64>) -> Result<Self> {
        if !xi.is_square() {
            return Err(Error::arg("Ξ must be square"));
        }
        let scale = xi.abs().max();
        if (xi + xi.transpose()).abs().max() > 1e-12 * scale.max(1.0) {
            return Err(Error::arg("Ξ must be skew-symmetric"));
        }
        let mut sq = -(xi * xi);
        // Symmetrise away rounding before the symmetric solver.
        sq = (&sq + sq.transpose()) * 0.5;
        let eig = sq.symmetric_eigen();
        let tol = 1e-12 * (scale * scale).max(1.0);
        let mut eigenvalues = Vec::with_capacity(eig.eigenvalues.len());
        for &s in eig.eigenvalues.iter() {
            if s < -tol {
                return Err(Error::Consistency(format!(
                    "−Ξ² has a negative eigenvalue {s:e}"
                )));
            }
            eigenvalues.push(s.max(0.0));
        }
        Ok(SkewSpectral {
            xi: xi.clone(),
            eigenvalues,
            eigenvectors: eig.eigenvectors,
        })
    }

    /// `Q diag(f(s_j)) Qᵀ`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let d = DMatrix::from_diagonal(&DVector::from_iterator(
            self.eigenvalues.len(),
            self.eigenvalues.iter().map(|&s| f(s)),
        ));
        &self.eigenvectors * d * self.eigenvectors.transpose()
    }
}

const SERIES_CUTOFF: f64 = 1e-8;

/// `ln(sinh(√s)/√s)`.
fn ln_sinhc(s: f64) -> f64 {
    if s < 1e-2 {
        // Truncation error below 1e-18 on this range.
        return s * (1.0 / 6.0 - s * (1.0 / 180.0 - s * (1.0 / 2835.0 - s * (1.0 / 37800.0 - s / 467775.0))));
    }
    let r = s.sqrt();
    if r < 20.0 {
        return (r.sinh() / r).ln();
    }
    // ln sinh r = r + ln(1 − e^{−2r}) − ln 2, avoids overflow.
    r + (-(-2.0 * r).exp_m1()).ln() - std::f64::consts::LN_2 - r.ln()
}

/// `√s·coth(√s)`.
fn x_coth_x(s: f64) -> f64 {
    if s < SERIES_CUTOFF {
        return 1.0 + s / 3.0 - s * s / 45.0;
    }
    let r = s.sqrt();
    r / r.tanh()
}

/// Heat-kernel factors `detFactor = [det(sinh(itΞ/2)/(itΞ/2))]^{−1/2}` and
/// `T(t;Ξ)^{-1}`.
#[derive(Clone, Debug)]
pub struct KernelFactor {
    pub det_factor: f64,
    pub tinv: DMatrix<f64>,
}

pub fn kernel_factor(t: f64, xi: &DMatrix<f64>) -> Result<KernelFactor> {
    if !(t > 0.0) {
        return Err(Error::arg("time must be positive"));
    }
    let spec = SkewSpectral::new(xi)?;
    let q = 0.25 * t * t;
    let log_g: f64 = spec.eigenvalues.iter().map(|&s| ln_sinhc(q * s)).sum();
    Ok(KernelFactor {
        det_factor: (-0.5 * log_g).exp(),
        tinv: spec.apply(|s| x_coth_x(q * s)),
    })
}

/// `detFactor` alone, without forming `T^{-1}`.
pub(crate) fn det_factor(t: f64, xi: &DMatrix<f64>) -> Result<f64> {
    let spec = SkewSpectral::new(xi)?;
    let q = 0.25 * t * t;
    let log_g: f64 = spec.eigenvalues.iter().map(|&s| ln_sinhc(q * s)).sum();
    Ok((-0.5 * log_g).exp())
}

/// Heat kernel of `½Σ(∂_i + (i/2)(Ξx)_i)²`-type magnetic operators:
/// `(2πt)^{−n/2} detFactor exp(−(i/2)⟨Ξx,y⟩ − (1/2t)⟨T^{-1}(y−x), y−x⟩)`.
pub fn oscillatory_kernel(t: f64, xi: &DMatrix<f64>, x: &[f64], y: &[f64]) -> Result<Complex64> {
    let n = xi.nrows();
    if x.len() != n || y.len() != n {
        return Err(Error::arg("points must match the size of Ξ"));
    }
    let kf = kernel_factor(t, xi)?;
    let xv = DVector::from_column_slice(x);
    let yv = DVector::from_column_slice(y);
    let diff = &yv - &xv;
    let phase = -0.5 * (xi * &xv).dot(&yv);
    let quad = -0.5 / t * diff.dot(&(&kf.tinv * &diff));
    let pref = (2.0 * std::f64::consts::PI * t).powf(-(n as f64) / 2.0) * kf.det_factor;
    Ok(Complex64::from_polar(pref * quad.exp(), phase))
}

/// Value of the group heat kernel with its quadrature error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelValue {
    pub value: f64,
    pub error: f64,
    /// Integral of the imaginary part, which vanishes in exact arithmetic.
    pub imaginary: f64,
}

/// `p̂_t((x,z)) = (2πt)^{−n/2−p} ∫ detFactor(1, η·C)
/// exp(−(1/t)[i⟨η,z⟩ + ½⟨T(1;η·C)^{-1}x, x⟩]) dη`, real part.
pub fn heat_kernel_at(t: f64, c: &StructureConstants, g: &GroupPoint, opts: &QuadOptions) -> Result<KernelValue> {
    if !(t > 0.0) {
        return Err(Error::arg("time must be positive"));
    }
    g.check(c)?;
    let (n, p) = (c.n(), c.p());
    let x = DVector::from_column_slice(&g.x);
    let norm = (2.0 * std::f64::consts::PI * t).powf(-(n as f64) / 2.0 - p as f64);
    if p == 0 {
        return Ok(KernelValue {
            value: norm * (-x.norm_squared() / (2.0 * t)).exp(),
            error: 0.0,
            imaginary: 0.0,
        });
    }
    c.ensure_full_rank()?;
    let on_diagonal_x = g.x.iter().all(|&v| v == 0.0);
    let envelope = |eta: &[f64]| -> f64 {
        let xi = c.contract(eta);
        if on_diagonal_x {
            return det_factor(1.0, &xi).expect("skew contraction");
        }
        let kf = kernel_factor(1.0, &xi).expect("skew contraction");
        let q = x.dot(&(&kf.tinv * &x));
        kf.det_factor * (-0.5 * q / t).exp()
    };
    let phase = |eta: &[f64]| -> f64 { eta.iter().zip(&g.z).map(|(a, b)| a * b).sum::<f64>() / t };
    let real = quad_decay(|eta| envelope(eta) * phase(eta).cos(), p, opts)?;
    let on_diagonal_z = g.z.iter().all(|&v| v == 0.0);
    let imag = if on_diagonal_z {
        QuadResult::zero()
    } else {
        quad_decay(|eta| -envelope(eta) * phase(eta).sin(), p, opts)?
    };
    let bound = (10.0 * real.error).max(opts.abs_tol).max(opts.rel_tol * real.value.abs());
    if imag.value.abs() > bound {
        return Err(Error::Consistency(format!(
            "imaginary part {:e} of the heat kernel does not vanish",
            imag.value
        )));
    }
    Ok(KernelValue {
        value: norm * real.value,
        error: norm * real.error,
        imaginary: norm * imag.value,
    })
}

/// `p_t(g0, g1) = p̂_t(g0^{-1} × g1)`.
pub fn nilpotent_kernel(
    t: f64,
    c: &StructureConstants,
    g0: &GroupPoint,
    g1: &GroupPoint,
    opts: &QuadOptions,
) -> Result<KernelValue> {
    let g = group_mul(&group_inv(g0, c)?, g1, c)?;
    heat_kernel_at(t, c, &g, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_branches_match() {
        for &s in &[1e-9, 1e-8, 1.1e-8, 1e-6, 9.9e-3, 1.01e-2] {
            let r: f64 = (s as f64).sqrt();
            let exact = (r.sinh() / r).ln();
            assert!((ln_sinhc(s) - exact).abs() < 1e-15);
            assert!((x_coth_x(s) - r / r.tanh()).abs() < 1e-14);
        }
        assert!((ln_sinhc(900.0) - ((30f64).sinh() / 30.0).ln()).abs() < 1e-12);
        // no overflow far out
        assert!(ln_sinhc(1e8).is_finite());
    }

    #[test]
    fn rotation_det_factor() {
        for &l in &[0.1, 1.0, 5.0] {
            let kf = kernel_factor(1.0, &rotation(2, 0, 1, l)).unwrap();
            let expect = (l / 2.0) / (l / 2.0).sinh();
            assert!((kf.det_factor - expect).abs() < 1e-14);
            let h = (l / 2.0) / (l / 2.0).tanh();
            assert!((kf.tinv.clone() - DMatrix::identity(2, 2) * h).abs().max() < 1e-13);
        }
    }
}
