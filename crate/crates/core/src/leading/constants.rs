use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{quad_decay, QuadMethod, QuadOptions, QuadResult};
use crate::steptwo::{det_factor, StructureConstants};
use crate::{Error, Result};

/// How a leading constant was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum C0Method {
    ClosedForm,
    Quadrature1d,
    QuadraturePd,
    Mc,
}

/// Leading coefficient `c_0` of `p_t(x,x) ~ t^{−ν/2} c_0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct C0Result {
    pub value: f64,
    pub error: f64,
    pub nu: usize,
    pub method: C0Method,
}

/// Reference measure for step-two groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    /// Lebesgue measure of the exponential coordinates.
    Lebesgue,
    /// Popp's measure.
    Popp,
}

fn method_of(q: &QuadResult, p: usize) -> C0Method {
    match (q.method, p) {
        (QuadMethod::Halton, _) => C0Method::Mc,
        (_, 1) => C0Method::Quadrature1d,
        _ => C0Method::QuadraturePd,
    }
}

/// `x / sinh x`, accurate near zero and without overflow for large `|x|`.
pub fn x_over_sinh(x: f64) -> f64 {
    let a = x.abs();
    if a < 1e-4 {
        1.0 - a * a / 6.0
    } else if a > 20.0 {
        2.0 * a * (-a).exp() / (1.0 - (-2.0 * a).exp())
    } else {
        a / a.sinh()
    }
}

/// Riemannian case: `(2π)^{−d/2}`, `ν = d`.
pub fn c0_riemannian(d: usize) -> Result<C0Result> {
    if d == 0 {
        return Err(Error::arg("dimension must be at least 1"));
    }
    Ok(C0Result {
        value: (2.0 * PI).powf(-(d as f64) / 2.0),
        error: 0.0,
        nu: d,
        method: C0Method::ClosedForm,
    })
}

/// 3D contact case: `(2π)^{−2} ∫ (λ/2)/sinh(λ/2) dλ`, `ν = 4`.
pub fn c0_contact3d(opts: &QuadOptions) -> Result<C0Result> {
    let q = quad_decay(|z| x_over_sinh(z[0] / 2.0), 1, opts)?;
    let norm = (2.0 * PI).powi(-2);
    Ok(C0Result {
        value: norm * q.value,
        error: norm * q.error,
        nu: 4,
        method: C0Method::Quadrature1d,
    })
}

/// Strictly pseudoconvex CR manifold of dimension `2k+1` with the Webster
/// volume: `½·(1/2π) ∫ ((1/2π)(λ/2)/sinh(λ/2))^k dλ`, `ν = 2k+2`.
pub fn c0_cr(k: usize, opts: &QuadOptions) -> Result<C0Result> {
    if k == 0 {
        return Err(Error::arg("CR dimension parameter k must be at least 1"));
    }
    let q = quad_decay(|z| (x_over_sinh(z[0] / 2.0) / (2.0 * PI)).powi(k as i32), 1, opts)?;
    let norm = 0.5 / (2.0 * PI);
    Ok(C0Result {
        value: norm * q.value,
        error: norm * q.error,
        nu: 2 * k + 2,
        method: C0Method::Quadrature1d,
    })
}

/// `√det(𝒞^{kl})` with `𝒞^{kl} = Σ_{ij} C^k_{ij} C^l_{ij}`.
pub fn popp_factor(c: &StructureConstants) -> Result<f64> {
    let p = c.p();
    let m = c.matrices();
    let gram = DMatrix::from_fn(p, p, |k, l| m[k].component_mul(&m[l]).sum());
    let det = if p == 0 { 1.0 } else { gram.determinant() };
    let scale = gram.abs().max().max(f64::MIN_POSITIVE).powi(p as i32);
    if !(det > 1e-12 * scale) {
        return Err(Error::Domain(
            "Gram matrix of the structure constants is singular".into(),
        ));
    }
    Ok(det.sqrt())
}

/// Step-two group: `(2π)^{−n/2−p} ∫_{R^p} detFactor(1, ζ·C) dζ`, times
/// [`popp_factor`] for Popp's measure; `ν = n + 2p`.
pub fn c0_steptwo(c: &StructureConstants, measure: Measure, opts: &QuadOptions) -> Result<C0Result> {
    let (n, p) = (c.n(), c.p());
    let norm = (2.0 * PI).powf(-(n as f64) / 2.0 - p as f64);
    let factor = match measure {
        Measure::Lebesgue => 1.0,
        Measure::Popp => popp_factor(c)?,
    };
    if p == 0 {
        return Ok(C0Result {
            value: norm,
            error: 0.0,
            nu: n,
            method: C0Method::ClosedForm,
        });
    }
    c.ensure_full_rank()?;
    let q = quad_decay(
        |zeta| det_factor(1.0, &c.contract(zeta)).expect("skew contraction"),
        p,
        opts,
    )?;
    Ok(C0Result {
        value: factor * norm * q.value,
        error: factor * norm * q.error,
        nu: n + 2 * p,
        method: method_of(&q, p),
    })
}
