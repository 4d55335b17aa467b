use std::ops::{Add, Neg, Sub};
use std::sync::Arc;

use super::{hall_basis, GrouplikeTensor, HallBasis, TruncatedTensor, Word};
use crate::scalar::Scalar;
use crate::{Error, Result};

/// Element `u = Σ u^I e_[I]` of `g^N(R^n)` in Hall coordinates.
#[derive(Clone, Debug)]
pub struct LieElement<T> {
    basis: Arc<HallBasis>,
    coeffs: Vec<T>,
}

impl<T: Scalar> PartialEq for LieElement<T> {
    fn eq(&self, other: &Self) -> bool {
        *self.basis == *other.basis && self.coeffs == other.coeffs
    }
}

impl<T: Scalar> LieElement<T> {
    pub fn zero(n: usize, depth: usize) -> Result<Self> {
        let basis = hall_basis(n, depth)?;
        let coeffs = vec![T::zero(); basis.len()];
        Ok(LieElement { basis, coeffs })
    }

    /// Coordinates listed in basis order.
    pub fn new(basis: Arc<HallBasis>, coeffs: Vec<T>) -> Result<Self> {
        if coeffs.len() != basis.len() {
            return Err(Error::arg(format!(
                "expected {} Hall coordinates, got {}",
                basis.len(),
                coeffs.len()
            )));
        }
        Ok(LieElement { basis, coeffs })
    }

    /// Degree-one element `Σ v_i e_i`.
    pub fn from_vector(v: &[T], depth: usize) -> Result<Self> {
        let mut u = Self::zero(v.len(), depth)?;
        u.coeffs[..v.len()].clone_from_slice(v);
        Ok(u)
    }

    pub fn basis(&self) -> &Arc<HallBasis> {
        &self.basis
    }

    pub fn n(&self) -> usize {
        self.basis.n()
    }

    pub fn depth(&self) -> usize {
        self.basis.depth()
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [T] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    /// Coordinate along the basis element whose Lyndon word is `word`.
    pub fn coefficient(&self, word: &Word) -> Option<&T> {
        self.basis.position(word).map(|i| &self.coeffs[i])
    }

    pub(crate) fn ensure_compatible(&self, other: &Self) -> Result<()> {
        if *self.basis != *other.basis {
            return Err(Error::arg(format!(
                "Lie elements live in different algebras: g^{}(R^{}) vs g^{}(R^{})",
                self.depth(),
                self.n(),
                other.depth(),
                other.n()
            )));
        }
        Ok(())
    }

    /// Expansion in the word basis.
    pub fn to_tensor(&self) -> TruncatedTensor<T> {
        let mut t = TruncatedTensor::zero(self.n(), self.depth()).expect("valid shape");
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let level = t.level_mut(self.basis.grade(i));
            for &(idx, a) in self.basis.expansion(i) {
                level[idx] += c.clone() * T::from_int(a);
            }
        }
        t
    }

    /// Hall coordinates of a Lie polynomial given in the word basis.
    ///
    /// Uses the triangularity of the Lyndon basis: the smallest word in the
    /// expansion of `e_[w]` is `w` itself with coefficient one. The scalar
    /// part and any non-Lie remainder are ignored; see
    /// [`LieElement::from_tensor_checked`].
    pub fn from_tensor(t: &TruncatedTensor<T>) -> Result<Self> {
        Ok(Self::extract(t)?.0)
    }

    /// Like [`LieElement::from_tensor`] but fails when the tensor is not a
    /// Lie polynomial to within `tol` (max-abs residual).
    pub fn from_tensor_checked(t: &TruncatedTensor<T>, tol: f64) -> Result<Self> {
        let (u, residual) = Self::extract(t)?;
        if residual > tol || t.scalar().abs_f64() > tol {
            return Err(Error::Consistency(format!(
                "tensor is not a Lie polynomial (residual {residual:e})"
            )));
        }
        Ok(u)
    }

    fn extract(t: &TruncatedTensor<T>) -> Result<(Self, f64)> {
        let basis = hall_basis(t.n(), t.depth())?;
        let n = t.n();
        let mut coeffs = vec![T::zero(); basis.len()];
        let mut residual = 0.0f64;
        for k in 1..=t.depth() {
            let mut level = t.level(k).to_vec();
            for i in basis.grade_range(k) {
                let lead = basis.word(i).level_index(n);
                let c = level[lead].clone();
                if c.is_zero() {
                    continue;
                }
                for &(idx, a) in basis.expansion(i) {
                    level[idx] -= c.clone() * T::from_int(a);
                }
                coeffs[i] = c;
            }
            for x in &level {
                residual = residual.max(x.abs_f64());
            }
        }
        Ok((LieElement { basis, coeffs }, residual))
    }

    pub fn exp(&self) -> GrouplikeTensor<T> {
        self.to_tensor().exp().expect("Lie polynomials have zero scalar part")
    }

    /// Lie bracket `[self, other]`, truncated at step `N`.
    pub fn bracket(&self, other: &Self) -> Result<Self> {
        self.ensure_compatible(other)?;
        let a = self.to_tensor();
        let b = other.to_tensor();
        Self::from_tensor(&(&a.mul(&b)? - &b.mul(&a)?))
    }

    /// Dilation: grade-`k` coordinates multiplied by `c^k`.
    pub fn dilate(&self, c: &T) -> Self {
        let powers: Vec<T> = (0..=self.depth()).map(|k| c.powu(k)).collect();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, x)| x.clone() * powers[self.basis.grade(i)].clone())
            .collect();
        LieElement {
            basis: self.basis.clone(),
            coeffs,
        }
    }

    /// Projection onto `g^depth`, `depth <= N`.
    pub fn project(&self, depth: usize) -> Result<Self> {
        let basis = self.basis.truncated(depth)?;
        let coeffs = self.coeffs[..basis.len()].to_vec();
        Ok(LieElement { basis, coeffs })
    }

    pub fn scale(&self, c: &T) -> Self {
        LieElement {
            basis: self.basis.clone(),
            coeffs: self.coeffs.iter().map(|x| x.clone() * c.clone()).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.ensure_compatible(other)
            .expect("comparing Lie elements of different algebras");
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a.clone() - b.clone()).abs_f64())
            .fold(0.0, f64::max)
    }

    pub fn to_f64(&self) -> LieElement<f64> {
        LieElement {
            basis: self.basis.clone(),
            coeffs: self.coeffs.iter().map(Scalar::to_f64).collect(),
        }
    }
}

/// Baker–Campbell–Hausdorff product `log(exp A ⊗ exp B)` in `g^N`.
pub fn bch<T: Scalar>(a: &LieElement<T>, b: &LieElement<T>) -> Result<LieElement<T>> {
    a.ensure_compatible(b)?;
    a.exp().mul(&b.exp())?.log()
}

impl<T: Scalar> Add for &LieElement<T> {
    type Output = LieElement<T>;
    fn add(self, rhs: Self) -> LieElement<T> {
        self.ensure_compatible(rhs).expect("adding incompatible Lie elements");
        LieElement {
            basis: self.basis.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }
}

impl<T: Scalar> Sub for &LieElement<T> {
    type Output = LieElement<T>;
    fn sub(self, rhs: Self) -> LieElement<T> {
        self + &(-rhs)
    }
}

impl<T: Scalar> Neg for &LieElement<T> {
    type Output = LieElement<T>;
    fn neg(self) -> LieElement<T> {
        self.scale(&-T::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::BigRational;

    #[test]
    fn exp_of_two_letters() {
        let (a, b): (f64, f64) = (0.7, -1.3);
        let u = LieElement::from_vector(&[a, b], 3).unwrap();
        let g = u.exp();
        let w12 = Word::new(vec![1, 2], 2).unwrap();
        assert!((g.coefficient(&w12) - a * b / 2.0).abs() < 1e-15);
    }

    #[test]
    fn bch_step_two_exact() {
        type Q = BigRational;
        let (a, b) = (Q::from_ratio(2, 3), Q::from_ratio(-5, 7));
        let x = LieElement::from_vector(&[a.clone(), Q::from_int(0)], 2).unwrap();
        let y = LieElement::from_vector(&[Q::from_int(0), b.clone()], 2).unwrap();
        let z = bch(&x, &y).unwrap();
        let expect = vec![a.clone(), b.clone(), a * b / Q::from_int(2)];
        assert_eq!(z.coeffs(), &expect[..]);
    }

    #[test]
    fn bch_with_zero() {
        let basis = hall_basis(2, 4).unwrap();
        let a = LieElement::new(basis.clone(), (0..basis.len()).map(|i| i as f64 * 0.1 - 0.3).collect())
            .unwrap();
        let z = LieElement::zero(2, 4).unwrap();
        assert!(bch(&a, &z).unwrap().max_abs_diff(&a) < 1e-14);
        assert!(bch(&a, &(-&a)).unwrap().max_abs_diff(&z) < 1e-14);
    }

    #[test]
    fn bracket_of_letters_is_basis_element() {
        let e1 = LieElement::from_vector(&[1.0, 0.0], 3).unwrap();
        let e2 = LieElement::from_vector(&[0.0, 1.0], 3).unwrap();
        let e12 = e1.bracket(&e2).unwrap();
        assert_eq!(e12.coeffs(), &[0.0, 0.0, 1.0, 0.0, 0.0]);
        // [[1,2],2] is the basis element of 122.
        let e122 = e12.bracket(&e2).unwrap();
        assert_eq!(e122.coeffs(), &[0.0, 0.0, 0.0, 0.0, 1.0]);
        // [1,[1,2]] is the basis element of 112.
        let e112 = e1.bracket(&e12).unwrap();
        assert_eq!(e112.coeffs(), &[0.0, 0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn checked_extraction_rejects_non_lie() {
        let mut t = TruncatedTensor::<f64>::zero(2, 2).unwrap();
        t.set_coefficient(&Word::new(vec![1, 2], 2).unwrap(), 1.0).unwrap();
        assert!(LieElement::from_tensor_checked(&t, 1e-12).is_err());
    }

    #[test]
    fn mismatched_algebras() {
        let a = LieElement::<f64>::zero(2, 2).unwrap();
        let b = LieElement::<f64>::zero(2, 3).unwrap();
        assert!(bch(&a, &b).is_err());
    }
}
