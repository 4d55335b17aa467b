//! Monte Carlo simulation of Brownian lifts, Lévy areas and step-two group
//! diffusions, with kernel-density estimates of their densities.
//!
//! Every sample draws from its own counter-based ChaCha8 stream, and all
//! reductions run over fixed-size chunks summed in index order, so estimates
//! are bit-identical for any number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::free_lie::LieElement;
use crate::signature::{log_signature, PiecewiseLinearPath};
use crate::steptwo::{GroupPoint, StructureConstants};
use crate::{Error, Result};

/// Reduction chunk size; fixed so that summation order never changes.
const CHUNK: usize = 4096;

/// Position `(seed, stream, counter)` in the ChaCha8 keystream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream: u64,
    pub counter: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        RngStream {
            seed,
            stream,
            counter: 0,
        }
    }

    /// Generator positioned at this stream's counter (in 32-bit words).
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng.set_word_pos(self.counter as u128);
        rng
    }
}

/// Monte Carlo estimate with its provenance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimEstimate {
    pub value: f64,
    pub stderr: f64,
    #[serde(rename = "N")]
    pub samples: usize,
    #[serde(rename = "m")]
    pub substeps: usize,
    /// Per-axis bandwidths, when kernel-smoothed.
    pub h: Option<Vec<f64>>,
    pub seed: u64,
}

/// Kernel bandwidth choice for [`estimate_diag`].
#[derive(Clone, Debug, PartialEq)]
pub enum Bandwidth {
    /// `h_i = 1.06 σ̂_i N^{−1/(q+4)}`.
    PlugIn,
    /// The same bandwidth on every axis.
    Fixed(f64),
    PerAxis(Vec<f64>),
}

fn check_steps(t: f64, m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::arg("need at least one substep"));
    }
    if !(t > 0.0) {
        return Err(Error::arg("time must be positive"));
    }
    Ok(())
}

/// `m` i.i.d. `N(0, (t/m) Id_n)` increments.
pub fn brownian_increments(n: usize, t: f64, m: usize, stream: &RngStream) -> Result<Vec<Vec<f64>>> {
    check_steps(t, m)?;
    let mut rng = stream.rng();
    let sd = (t / m as f64).sqrt();
    Ok((0..m)
        .map(|_| (0..n).map(|_| sd * rng.sample::<f64, _>(StandardNormal)).collect())
        .collect())
}

/// Log-signature at step `depth` of the piecewise-linear interpolation of a
/// Brownian path on `[0, t]` with `m` pieces.
pub fn brownian_lift(n: usize, depth: usize, t: f64, m: usize, stream: &RngStream) -> Result<LieElement<f64>> {
    let inc = brownian_increments(n, t, m, stream)?;
    log_signature(&PiecewiseLinearPath::from_increments(&inc)?, depth)
}

/// One sample of the left-invariant diffusion on the step-two group, started
/// at the identity: `x = w_t`, `z^k = Σ_{i<j} C^k_{ij} S^{ij}` with the
/// piecewise-linear Lévy areas `S^{ij} = ½∫(w^i dw^j − w^j dw^i)`.
pub fn simulate_group_point(c: &StructureConstants, t: f64, m: usize, stream: &RngStream) -> Result<GroupPoint> {
    check_steps(t, m)?;
    let mut out = vec![0.0; c.n() + c.p()];
    let mut scratch = Scratch::new(c.n());
    sample_into(c, t, m, stream, &mut scratch, &mut out);
    let z = out.split_off(c.n());
    Ok(GroupPoint::new(out, z))
}

struct Scratch {
    w: Vec<f64>,
    dw: Vec<f64>,
    area: Vec<f64>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Scratch {
            w: vec![0.0; n],
            dw: vec![0.0; n],
            area: vec![0.0; n * n],
        }
    }
}

fn sample_into(c: &StructureConstants, t: f64, m: usize, stream: &RngStream, s: &mut Scratch, out: &mut [f64]) {
    let n = c.n();
    let mut rng = stream.rng();
    let sd = (t / m as f64).sqrt();
    s.w.iter_mut().for_each(|v| *v = 0.0);
    s.area.iter_mut().for_each(|v| *v = 0.0);
    for _ in 0..m {
        for d in s.dw.iter_mut() {
            *d = sd * rng.sample::<f64, _>(StandardNormal);
        }
        if c.p() > 0 {
            for i in 0..n {
                for j in i + 1..n {
                    s.area[i * n + j] += s.w[i] * s.dw[j] - s.w[j] * s.dw[i];
                }
            }
        }
        for (w, d) in s.w.iter_mut().zip(&s.dw) {
            *w += d;
        }
    }
    out[..n].copy_from_slice(&s.w);
    for (k, ck) in c.matrices().iter().enumerate() {
        let mut z = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                z += ck[(i, j)] * 0.5 * s.area[i * n + j];
            }
        }
        out[n + k] = z;
    }
}

/// `count` samples of the group diffusion at time `t`, flattened row-major
/// (`n + p` numbers per sample). Sample `i` uses stream `first_stream + i`.
pub fn simulate_group_samples(
    c: &StructureConstants,
    t: f64,
    m: usize,
    count: usize,
    seed: u64,
    first_stream: u64,
) -> Result<Vec<f64>> {
    check_steps(t, m)?;
    let q = c.n() + c.p();
    let mut out = vec![0.0; count * q];
    out.par_chunks_mut(CHUNK * q)
        .enumerate()
        .for_each(|(chunk, rows)| {
            let mut scratch = Scratch::new(c.n());
            for (r, row) in rows.chunks_mut(q).enumerate() {
                let i = (chunk * CHUNK + r) as u64;
                sample_into(c, t, m, &RngStream::new(seed, first_stream + i), &mut scratch, row);
            }
        });
    Ok(out)
}

/// Mean and standard error of `f` over the rows of `samples`, reduced in a
/// fixed order.
pub fn sample_mean(samples: &[f64], q: usize, f: impl Fn(&[f64]) -> f64 + Sync) -> (f64, f64) {
    let parts: Vec<(f64, f64)> = samples
        .par_chunks(CHUNK * q)
        .map(|rows| {
            rows.chunks(q).fold((0.0, 0.0), |(s, s2), r| {
                let v = f(r);
                (s + v, s2 + v * v)
            })
        })
        .collect();
    let (s, s2) = parts.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let n = (samples.len() / q) as f64;
    let mean = s / n;
    let var = if n > 1.0 {
        ((s2 - n * mean * mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    (mean, (var / n).sqrt())
}

/// Product Gaussian kernel `Π_i φ(u_i/h_i)/h_i`.
fn gaussian_kernel(x: &[f64], y: &[f64], h: &[f64]) -> f64 {
    let mut e = 0.0;
    let mut norm = 1.0;
    for ((a, b), hi) in x.iter().zip(y).zip(h) {
        let u = (a - b) / hi;
        e += u * u;
        norm *= hi * (2.0 * std::f64::consts::PI).sqrt();
    }
    (-0.5 * e).exp() / norm
}

/// Plug-in bandwidths `1.06 σ̂_i N^{−1/(q+4)}`.
pub fn plug_in_bandwidth(samples: &[f64], q: usize) -> Vec<f64> {
    let count = samples.len() / q;
    let factor = 1.06 * (count as f64).powf(-1.0 / (q as f64 + 4.0));
    (0..q)
        .map(|i| {
            let (mean, _) = sample_mean(samples, q, |r| r[i]);
            let (sq, _) = sample_mean(samples, q, |r| (r[i] - mean).powi(2));
            factor * sq.sqrt()
        })
        .collect()
}

/// Kernel density estimate `(1/N) Σ K_h(X_i − y)` at `y`.
pub fn kde_estimate(samples: &[f64], q: usize, y: &[f64], h: &[f64]) -> Result<SimEstimate> {
    if q == 0 || samples.is_empty() || samples.len() % q != 0 {
        return Err(Error::arg("samples must be a non-empty multiple of the dimension"));
    }
    if y.len() != q || h.len() != q {
        return Err(Error::arg("evaluation point and bandwidths must have the sample dimension"));
    }
    if h.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::arg("bandwidths must be positive"));
    }
    let (value, stderr) = sample_mean(samples, q, |x| gaussian_kernel(x, y, h));
    Ok(SimEstimate {
        value,
        stderr,
        samples: samples.len() / q,
        substeps: 0,
        h: Some(h.to_vec()),
        seed: 0,
    })
}

/// Kernel-density estimate of `p_t(e, e)` from `(w_t, z)` samples.
pub fn estimate_diag(
    c: &StructureConstants,
    t: f64,
    samples: usize,
    m: usize,
    bandwidth: &Bandwidth,
    seed: u64,
) -> Result<SimEstimate> {
    if samples < 2 {
        return Err(Error::arg("need at least two samples"));
    }
    let q = c.n() + c.p();
    let data = simulate_group_samples(c, t, m, samples, seed, 0)?;
    let h = match bandwidth {
        Bandwidth::PlugIn => plug_in_bandwidth(&data, q),
        Bandwidth::Fixed(h) => vec![*h; q],
        Bandwidth::PerAxis(h) => h.clone(),
    };
    let mut est = kde_estimate(&data, q, &vec![0.0; q], &h)?;
    est.substeps = m;
    est.seed = seed;
    Ok(est)
}

/// Estimates of `E[cos(λ S_t) k_h(w_t)]` for planar Brownian motion, one per
/// `λ` (the real part of `E[e^{iλS_t} δ_0(w_t)]`, the sine part vanishing by
/// symmetry).
pub fn levy_characteristic(
    lambdas: &[f64],
    t: f64,
    samples: usize,
    m: usize,
    h: f64,
    seed: u64,
) -> Result<Vec<SimEstimate>> {
    let c = StructureConstants::heisenberg();
    let data = simulate_group_samples(&c, t, m, samples, seed, 0)?;
    levy_characteristic_from(&data, lambdas, h, m, seed)
}

/// [`levy_characteristic`] on precomputed Heisenberg samples `(w¹, w², S)`.
pub fn levy_characteristic_from(
    data: &[f64],
    lambdas: &[f64],
    h: f64,
    m: usize,
    seed: u64,
) -> Result<Vec<SimEstimate>> {
    if !(h > 0.0) {
        return Err(Error::arg("bandwidth must be positive"));
    }
    let hh = [h, h];
    Ok(lambdas
        .iter()
        .map(|&l| {
            let (value, stderr) =
                sample_mean(data, 3, |r| (l * r[2]).cos() * gaussian_kernel(&r[..2], &[0.0, 0.0], &hh));
            SimEstimate {
                value,
                stderr,
                samples: data.len() / 3,
                substeps: m,
                h: Some(vec![h, h]),
                seed,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a = brownian_increments(2, 1.0, 5, &RngStream::new(7, 3)).unwrap();
        let b = brownian_increments(2, 1.0, 5, &RngStream::new(7, 3)).unwrap();
        let c = brownian_increments(2, 1.0, 5, &RngStream::new(7, 4)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn counter_offsets_the_stream() {
        let s = RngStream::new(1, 2);
        let mut r0 = s.rng();
        let _: u32 = r0.random();
        let _: u32 = r0.random();
        let mut r2 = RngStream { counter: 2, ..s }.rng();
        assert_eq!(r0.random::<u64>(), r2.random::<u64>());
    }

    #[test]
    fn lift_grade_one_is_endpoint() {
        let s = RngStream::new(11, 0);
        let inc = brownian_increments(2, 1.0, 20, &s).unwrap();
        let u = brownian_lift(2, 3, 1.0, 20, &s).unwrap();
        let w: Vec<f64> = (0..2).map(|i| inc.iter().map(|d| d[i]).sum()).collect();
        assert!((u.coeffs()[0] - w[0]).abs() < 1e-13);
        assert!((u.coeffs()[1] - w[1]).abs() < 1e-13);
    }

    #[test]
    fn group_sample_area_matches_lift() {
        let c = StructureConstants::heisenberg();
        let s = RngStream::new(5, 9);
        let g = simulate_group_point(&c, 1.0, 50, &s).unwrap();
        let u = brownian_lift(2, 2, 1.0, 50, &s).unwrap();
        assert!((g.z[0] - u.coeffs()[2]).abs() < 1e-13);
        assert!((g.x[0] - u.coeffs()[0]).abs() < 1e-13);
    }

    #[test]
    fn diag_estimate_is_kde_at_origin() {
        let c = crate::steptwo::StructureConstants::heisenberg();
        let h = vec![0.2, 0.2, 0.1];
        let est = estimate_diag(&c, 0.5, 2000, 10, &Bandwidth::PerAxis(h.clone()), 11).unwrap();
        let data = simulate_group_samples(&c, 0.5, 10, 2000, 11, 0).unwrap();
        let kde = kde_estimate(&data, 3, &[0.0; 3], &h).unwrap();
        assert_eq!(est.value.to_bits(), kde.value.to_bits());
        assert_eq!(est.stderr.to_bits(), kde.stderr.to_bits());
        assert_eq!((est.samples, est.substeps, est.seed), (2000, 10, 11));
    }

    #[test]
    fn kde_rejects_bad_bandwidth() {
        assert!(kde_estimate(&[0.0, 1.0], 1, &[0.0], &[0.0]).is_err());
    }
}
