//! Frames used throughout the test suite and the CLI.

use super::{Frame, PolyVectorField, Polynomial};
use crate::scalar::Scalar;

fn var<T: Scalar>(d: usize, i: usize) -> Polynomial<T> {
    Polynomial::var(d, i)
}

fn one<T: Scalar>(d: usize) -> Polynomial<T> {
    Polynomial::constant(d, T::one())
}

/// Normal frame of a 3D contact structure,
///
/// `V_1 = ∂_1 + (x_2/2)∂_3 + β x_2 (x_2∂_1 − x_1∂_2) + γ x_2 ∂_3`,
/// `V_2 = ∂_2 − (x_1/2)∂_3 − β x_1 (x_2∂_1 − x_1∂_2) + γ x_1 ∂_3`.
///
/// With `β = γ = 0` this is the Heisenberg frame with `[V_1, V_2] = −∂_3`.
pub fn contact3d_frame<T: Scalar>(beta: &Polynomial<T>, gamma: &Polynomial<T>) -> Frame<T> {
    let d = 3;
    let (x1, x2) = (var::<T>(d, 0), var::<T>(d, 1));
    let half = T::from_ratio(1, 2);
    // rotation field x_2∂_1 − x_1∂_2
    let rot = [x2.clone(), x1.scale(&-T::one())];
    let bx1 = beta.mul(&x1);
    let bx2 = beta.mul(&x2);
    let v1 = vec![
        one::<T>(d).add(&bx2.mul(&rot[0])),
        bx2.mul(&rot[1]),
        x2.scale(&half).add(&gamma.mul(&x2)),
    ];
    let v2 = vec![
        bx1.mul(&rot[0]).scale(&-T::one()),
        one::<T>(d).sub(&bx1.mul(&rot[1])),
        x1.scale(&-half).add(&gamma.mul(&x1)),
    ];
    Frame::new(vec![
        PolyVectorField::new(v1).unwrap(),
        PolyVectorField::new(v2).unwrap(),
    ])
    .unwrap()
}

/// `V_1 = ∂_1 + (x_2/2)∂_3`, `V_2 = ∂_2 − (x_1/2)∂_3`.
pub fn heisenberg_frame<T: Scalar>() -> Frame<T> {
    contact3d_frame(&Polynomial::zero(3), &Polynomial::zero(3))
}

/// Martinet frame `V_1 = ∂_1`, `V_2 = ∂_2 + x_1² ∂_3`.
pub fn martinet_frame<T: Scalar>() -> Frame<T> {
    let d = 3;
    let v1 = PolyVectorField::coordinate(d, 0);
    let v2 = PolyVectorField::new(vec![Polynomial::zero(d), one(d), var::<T>(d, 0).pow(2)]).unwrap();
    Frame::new(vec![v1, v2]).unwrap()
}

/// Leading part of the Folland–Stein normal frame of a strictly
/// pseudoconvex CR manifold of dimension `2k+1`:
/// `V_{2α−1} = (∂_{2α−1} + 2x_{2α}∂_{2k+1})/√2`,
/// `V_{2α} = (∂_{2α} − 2x_{2α−1}∂_{2k+1})/√2`.
pub fn cr_frame(k: usize) -> Frame<f64> {
    assert!(k >= 1);
    let d = 2 * k + 1;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut fields = Vec::with_capacity(2 * k);
    for a in 0..k {
        let (i, j) = (2 * a, 2 * a + 1);
        let mut x = vec![Polynomial::zero(d); d];
        x[i] = Polynomial::constant(d, s);
        x[d - 1] = var::<f64>(d, j).scale(&(2.0 * s));
        let mut y = vec![Polynomial::zero(d); d];
        y[j] = Polynomial::constant(d, s);
        y[d - 1] = var::<f64>(d, i).scale(&(-2.0 * s));
        fields.push(PolyVectorField::new(x).unwrap());
        fields.push(PolyVectorField::new(y).unwrap());
    }
    Frame::new(fields).unwrap()
}

/// Constant frame whose `i`-th field has the components `columns[i]`.
pub fn constant_frame<T: Scalar>(columns: &[Vec<T>]) -> crate::Result<Frame<T>> {
    let fields = columns
        .iter()
        .map(|c| {
            let d = c.len();
            PolyVectorField::new(c.iter().map(|v| Polynomial::constant(d, v.clone())).collect())
        })
        .collect::<crate::Result<Vec<_>>>()?;
    Frame::new(fields)
}

/// Orthonormal frame `G^{-1/2}` of the constant Riemannian metric `G`.
pub fn riemannian_frame(metric: &nalgebra::DMatrix<f64>) -> crate::Result<Frame<f64>> {
    let b = crate::linalg::inverse_sqrt_spd(metric)?;
    let cols: Vec<Vec<f64>> = (0..b.ncols())
        .map(|j| b.column(j).iter().copied().collect())
        .collect();
    constant_frame(&cols)
}
