use super::gamma::b_matrix;
use super::{Frame, PolyVectorField, Polynomial};
use crate::free_lie::{GrouplikeTensor, LieElement};
use crate::scalar::{inverse_factorials, Scalar};
use crate::{Error, Result};

fn check_shapes<T: Scalar>(frame: &Frame<T>, x: &[T], n: usize) -> Result<()> {
    if x.len() != frame.dim() {
        return Err(Error::arg(format!(
            "point has {} coordinates, frame lives on R^{}",
            x.len(),
            frame.dim()
        )));
    }
    if n != frame.n() {
        return Err(Error::arg(format!(
            "element over {n} letters used with a frame of {} fields",
            frame.n()
        )));
    }
    Ok(())
}

/// The vector field `W_u = Σ_{I∈G(N)} u^I V_[I]`.
pub fn lie_field<T: Scalar>(frame: &Frame<T>, u: &LieElement<T>) -> Result<PolyVectorField<T>> {
    if u.n() != frame.n() {
        return Err(Error::arg("Lie element and frame use different alphabets"));
    }
    let fields = frame.hall_fields(u.depth())?;
    let mut w = PolyVectorField::zero(frame.dim());
    for (c, v) in u.coeffs().iter().zip(&fields) {
        if !c.is_zero() {
            w = w.add(&v.scale(c));
        }
    }
    Ok(w)
}

/// `M_N(x,u)^{ij} = δ_ij + Σ_{k=1}^{N−1} 1/(k+1)! Σ_{I_1..I_k ∈ G(N)}
/// ∂_j(V_[I_1] ⋯ V_[I_k] x^i)(x) u^{I_1} ⋯ u^{I_k}`, with `N = u.depth()`.
///
/// The inner sums are evaluated as `∂_j(W_u^k x^i)`.
pub fn taylor_m<T: Scalar>(frame: &Frame<T>, x: &[T], u: &LieElement<T>) -> Result<Vec<Vec<T>>> {
    check_shapes(frame, x, u.n())?;
    let d = frame.dim();
    let depth = u.depth();
    let w = lie_field(frame, u)?;
    let inv = inverse_factorials::<T>(depth);
    let mut m = vec![vec![T::zero(); d]; d];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = T::one();
        let mut f = Polynomial::var(d, i);
        for k in 1..depth {
            f = w.apply(&f);
            for (j, mij) in row.iter_mut().enumerate() {
                *mij += inv[k + 1].clone() * f.derivative(j).eval(x);
            }
        }
    }
    Ok(m)
}

/// `F_N(x,u) = M_N(x,u) B_N(x) u`.
pub fn taylor_f<T: Scalar>(frame: &Frame<T>, x: &[T], u: &LieElement<T>) -> Result<Vec<T>> {
    let m = taylor_m(frame, x, u)?;
    let b = b_matrix(frame, x, u.depth())?;
    let bu: Vec<T> = b
        .iter()
        .map(|row| {
            row.iter()
                .zip(u.coeffs())
                .fold(T::zero(), |acc, (a, c)| acc + a.clone() * c.clone())
        })
        .collect();
    Ok(m.iter()
        .map(|row| {
            row.iter()
                .zip(&bu)
                .fold(T::zero(), |acc, (a, c)| acc + a.clone() * c.clone())
        })
        .collect())
}

/// `Σ_{I ∈ I(N)} (V_I Id)(x) π_I(g)` with `V_I = V_{i_1} ⋯ V_{i_k}`.
pub fn tensor_pushforward<T: Scalar>(
    frame: &Frame<T>,
    x: &[T],
    g: &GrouplikeTensor<T>,
) -> Result<Vec<T>> {
    check_shapes(frame, x, g.n())?;
    let d = frame.dim();
    let n = frame.n();
    let t = g.tensor();
    let mut out = vec![T::zero(); d];
    // level[idx][i] = V_I x^i for the words I of the current length.
    let mut level: Vec<Vec<Polynomial<T>>> = vec![(0..d).map(|i| Polynomial::var(d, i)).collect()];
    for k in 1..=g.depth() {
        let mut next = Vec::with_capacity(level.len() * n);
        for v in frame.fields() {
            for f in &level {
                next.push(f.iter().map(|p| v.apply(p)).collect::<Vec<_>>());
            }
        }
        for (idx, c) in t.level(k).iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (o, p) in out.iter_mut().zip(&next[idx]) {
                *o += p.eval(x) * c.clone();
            }
        }
        level = next;
    }
    Ok(out)
}
