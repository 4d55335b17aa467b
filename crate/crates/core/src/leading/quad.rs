use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Settings for [`quad_decay`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadOptions {
    /// Refinement stops when successive values differ by less than
    /// `max(abs_tol, rel_tol·|value|)`.
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Truncation radius: `sup_{|ζ| ≥ R} |f| < tail_rel·|f(0)|`.
    pub tail_rel: f64,
    pub max_radius: f64,
    /// Gauss–Legendre nodes per axis on the first pass; doubled (2m − 1) on refinement.
    pub start_nodes: usize,
    pub max_nodes: usize,
    /// Largest dimension handled by tensor rules; above it, quasi-Monte Carlo.
    pub max_tensor_dim: usize,
    pub qmc_points: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: 1e-14,
            rel_tol: 1e-11,
            tail_rel: 1e-12,
            max_radius: 1e4,
            start_nodes: 33,
            max_nodes: 4097,
            max_tensor_dim: 3,
            qmc_points: 1 << 20,
        }
    }
}

impl QuadOptions {
    fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0 && self.tail_rel > 0.0) {
            return Err(Error::arg("quadrature tolerances must be positive"));
        }
        if !(self.max_radius > 0.0) {
            return Err(Error::arg("maximum radius must be positive"));
        }
        if self.start_nodes < 2 || self.max_nodes < self.start_nodes || self.qmc_points < 2 {
            return Err(Error::arg("invalid node counts"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadMethod {
    /// Tensor Gauss–Legendre rule.
    GaussLegendre,
    /// Halton quasi-Monte Carlo.
    Halton,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: f64,
    /// Last refinement delta (tensor rule) or standard error (QMC).
    pub error: f64,
    pub radius: f64,
    pub evaluations: usize,
    pub method: QuadMethod,
}

impl QuadResult {
    pub fn zero() -> Self {
        QuadResult {
            value: 0.0,
            error: 0.0,
            radius: 0.0,
            evaluations: 0,
            method: QuadMethod::GaussLegendre,
        }
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, cached per order.
pub fn gauss_legendre(m: usize) -> Arc<(Vec<f64>, Vec<f64>)> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<(Vec<f64>, Vec<f64>)>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(r) = cache.lock().unwrap().get(&m) {
        return r.clone();
    }
    let rule = Arc::new(compute_gauss_legendre(m));
    cache.lock().unwrap().insert(m, rule.clone());
    rule
}

/// `P_m(x)` and `P_m'(x)` by the three-term recurrence.
fn legendre(m: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn compute_gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m >= 1);
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    let mf = m as f64;
    for i in 0..m.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(m, z);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(m, z);
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[m - 1 - i] = z;
        w[i] = wi;
        w[m - 1 - i] = wi;
    }
    if m % 2 == 1 {
        x[m / 2] = 0.0;
    }
    (x, w)
}

/// Unit directions used to probe decay on spheres in `R^p`.
fn probe_directions(p: usize) -> Vec<Vec<f64>> {
    let mut dirs = Vec::new();
    for i in 0..p {
        for s in [-1.0, 1.0] {
            let mut v = vec![0.0; p];
            v[i] = s;
            dirs.push(v);
        }
    }
    if p >= 2 {
        for mask in 0..(1usize << p.min(6)) {
            let v: Vec<f64> = (0..p)
                .map(|i| if (mask >> (i % 6)) & 1 == 1 { -1.0 } else { 1.0 })
                .collect();
            dirs.push(v);
        }
        for k in 1..=32 {
            dirs.push((0..p).map(|i| 2.0 * halton(k, i) - 1.0).collect());
        }
    }
    dirs.into_iter()
        .map(|v| {
            let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            v.into_iter().map(|a| a / n).collect()
        })
        .collect()
}

const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Radical inverse of `index` in the base of the `dim`-th prime.
pub fn halton(index: u64, dim: usize) -> f64 {
    let b = PRIMES[dim % PRIMES.len()];
    let (mut f, mut r, mut i) = (1.0, 0.0, index);
    while i > 0 {
        f /= b as f64;
        r += f * (i % b) as f64;
        i /= b;
    }
    r
}

/// Smallest power-of-two radius beyond which `|f|` stays under the tail threshold.
fn decay_radius(f: &(impl Fn(&[f64]) -> f64 + Sync), p: usize, opts: &QuadOptions) -> Result<Option<f64>> {
    let dirs = probe_directions(p);
    let sup_on_shell = |r0: f64| -> f64 {
        let mut m: f64 = 0.0;
        for s in 0..=4 {
            let r = r0 * (1.0 + s as f64 / 4.0);
            for d in &dirs {
                let z: Vec<f64> = d.iter().map(|a| a * r).collect();
                m = m.max(f(&z).abs());
            }
        }
        m
    };
    let mut reference = f(&vec![0.0; p]).abs();
    if reference == 0.0 {
        reference = sup_on_shell(0.5);
        if reference == 0.0 {
            return Ok(None);
        }
    }
    let threshold = opts.tail_rel * reference;
    let mut r = 1.0;
    while r <= opts.max_radius {
        if sup_on_shell(r) < threshold {
            return Ok(Some(r));
        }
        r *= 2.0;
    }
    Err(Error::DecayNotDetected { radius: opts.max_radius })
}

/// `∫_{R^p} f` for integrands with exponential decay.
///
/// The domain is truncated to `[-R, R]^p` where `|f|` has dropped below
/// `tail_rel·|f(0)|`, then integrated by a tensor Gauss–Legendre rule with node
/// doubling (`p <= max_tensor_dim`) or by Halton points. Node evaluations run
/// in parallel and are summed in a fixed order, so results do not depend on
/// the thread count.
pub fn quad_decay(f: impl Fn(&[f64]) -> f64 + Sync, p: usize, opts: &QuadOptions) -> Result<QuadResult> {
    opts.validate()?;
    if p == 0 {
        return Err(Error::arg("integration dimension must be at least 1"));
    }
    let Some(radius) = decay_radius(&f, p, opts)? else {
        return Ok(QuadResult::zero());
    };
    if p > opts.max_tensor_dim {
        return Ok(halton_rule(&f, p, radius, opts.qmc_points));
    }
    let mut m = opts.start_nodes;
    let mut prev = tensor_rule(&f, p, radius, m);
    let mut evaluations = m.pow(p as u32);
    loop {
        let next_m = 2 * m - 1;
        if next_m > opts.max_nodes {
            return Err(Error::NonConvergence {
                message: format!("Gauss–Legendre refinement exhausted {} nodes per axis", opts.max_nodes),
                estimate: prev,
                bound: opts.abs_tol.max(opts.rel_tol * prev.abs()),
            });
        }
        m = next_m;
        let value = tensor_rule(&f, p, radius, m);
        evaluations += m.pow(p as u32);
        let delta = (value - prev).abs();
        if delta < opts.abs_tol.max(opts.rel_tol * value.abs()) {
            return Ok(QuadResult {
                value,
                error: delta,
                radius,
                evaluations,
                method: QuadMethod::GaussLegendre,
            });
        }
        prev = value;
    }
}

fn tensor_rule(f: &(impl Fn(&[f64]) -> f64 + Sync), p: usize, radius: f64, m: usize) -> f64 {
    let rule = gauss_legendre(m);
    let (x, w) = (&rule.0, &rule.1);
    let inner = m.pow(p as u32 - 1);
    let partial: Vec<f64> = (0..m)
        .into_par_iter()
        .map(|i0| {
            let mut z = vec![0.0; p];
            let mut acc = 0.0;
            for rest in 0..inner {
                z[0] = radius * x[i0];
                let mut weight = w[i0];
                let mut r = rest;
                for zk in z.iter_mut().skip(1) {
                    let ik = r % m;
                    r /= m;
                    *zk = radius * x[ik];
                    weight *= w[ik];
                }
                acc += weight * f(&z);
            }
            acc
        })
        .collect();
    partial.iter().sum::<f64>() * radius.powi(p as i32)
}

fn halton_rule(f: &(impl Fn(&[f64]) -> f64 + Sync), p: usize, radius: f64, points: usize) -> QuadResult {
    const CHUNK: usize = 4096;
    let chunks = points.div_ceil(CHUNK);
    let partial: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut z = vec![0.0; p];
            let (mut s, mut s2) = (0.0, 0.0);
            for k in c * CHUNK..((c + 1) * CHUNK).min(points) {
                for (i, zi) in z.iter_mut().enumerate() {
                    *zi = radius * (2.0 * halton(k as u64 + 1, i) - 1.0);
                }
                let v = f(&z);
                s += v;
                s2 += v * v;
            }
            (s, s2)
        })
        .collect();
    let (s, s2) = partial.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let nf = points as f64;
    let mean = s / nf;
    let var = (s2 / nf - mean * mean).max(0.0);
    let vol = (2.0 * radius).powi(p as i32);
    QuadResult {
        value: vol * mean,
        error: vol * (var / nf).sqrt(),
        radius,
        evaluations: points,
        method: QuadMethod::Halton,
    }
}
