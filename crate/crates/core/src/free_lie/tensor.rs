use std::ops::{Add, Neg, Sub};

use super::{check_dims, LieElement, Word};
use crate::scalar::{inverse_factorials, Scalar};
use crate::{Error, Result};

/// Element of the truncated tensor algebra `T^N(R^n)`.
///
/// Level `k` holds the `n^k` coefficients of the words of length `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedTensor<T> {
    n: usize,
    depth: usize,
    scalar: T,
    levels: Vec<Vec<T>>,
}

/// Tensor with scalar part one, e.g. a signature or `exp(u)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GrouplikeTensor<T>(TruncatedTensor<T>);

/// Scalar parts further than this from one are rejected by
/// [`GrouplikeTensor::new`].
const UNIT_SCALAR_TOL: f64 = 1e-12;

impl<T: Scalar> TruncatedTensor<T> {
    pub fn zero(n: usize, depth: usize) -> Result<Self> {
        check_dims(n, depth)?;
        let levels = (1..=depth)
            .map(|k| vec![T::zero(); n.pow(k as u32)])
            .collect();
        Ok(TruncatedTensor {
            n,
            depth,
            scalar: T::zero(),
            levels,
        })
    }

    pub fn one(n: usize, depth: usize) -> Result<Self> {
        let mut t = Self::zero(n, depth)?;
        t.scalar = T::one();
        Ok(t)
    }

    /// Degree-one tensor `Σ v_i e_i`.
    pub fn from_vector(v: &[T], depth: usize) -> Result<Self> {
        let mut t = Self::zero(v.len(), depth)?;
        t.levels[0].clone_from_slice(v);
        Ok(t)
    }

    /// Tensor with the given coefficients; every word must fit in `depth`.
    pub fn from_terms<'a>(
        n: usize,
        depth: usize,
        scalar: T,
        terms: impl IntoIterator<Item = (&'a Word, T)>,
    ) -> Result<Self> {
        let mut t = Self::zero(n, depth)?;
        t.scalar = scalar;
        for (w, c) in terms {
            t.check_word(w)?;
            if w.len() <= depth {
                t.levels[w.len() - 1][w.level_index(n)] += c;
            }
        }
        Ok(t)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn scalar(&self) -> &T {
        &self.scalar
    }

    pub fn set_scalar(&mut self, value: T) {
        self.scalar = value;
    }

    /// Coefficients of the words of length `k` (`1 <= k <= N`), in level-index order.
    pub fn level(&self, k: usize) -> &[T] {
        &self.levels[k - 1]
    }

    pub fn level_mut(&mut self, k: usize) -> &mut [T] {
        &mut self.levels[k - 1]
    }

    fn check_word(&self, word: &Word) -> Result<()> {
        match word.letters().iter().find(|&&l| l as usize > self.n) {
            Some(l) => Err(Error::arg(format!("letter {l} outside 1..={}", self.n))),
            None => Ok(()),
        }
    }

    /// Coefficient of `word`; zero for words longer than the truncation step.
    pub fn coefficient(&self, word: &Word) -> T {
        assert!(
            word.letters().iter().all(|&l| l as usize <= self.n),
            "word {word} uses letters outside 1..={}",
            self.n
        );
        if word.len() > self.depth {
            return T::zero();
        }
        self.levels[word.len() - 1][word.level_index(self.n)].clone()
    }

    pub fn set_coefficient(&mut self, word: &Word, value: T) -> Result<()> {
        self.check_word(word)?;
        if word.len() > self.depth {
            return Err(Error::arg(format!(
                "word {word} is longer than the truncation step {}",
                self.depth
            )));
        }
        self.levels[word.len() - 1][word.level_index(self.n)] = value;
        Ok(())
    }

    /// All non-zero coefficients as (word, value), ordered by (length, lex).
    pub fn terms(&self) -> Vec<(Word, T)> {
        let mut out = Vec::new();
        for (k, level) in self.levels.iter().enumerate() {
            for (i, c) in level.iter().enumerate() {
                if !c.is_zero() {
                    out.push((Word::from_level_index(i, k + 1, self.n), c.clone()));
                }
            }
        }
        out
    }

    pub(crate) fn ensure_compatible(&self, other: &Self) -> Result<()> {
        if self.n != other.n || self.depth != other.depth {
            return Err(Error::arg(format!(
                "tensor shapes differ: T^{}(R^{}) vs T^{}(R^{})",
                self.depth, self.n, other.depth, other.n
            )));
        }
        Ok(())
    }

    /// Truncated tensor product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.ensure_compatible(other)?;
        let n = self.n;
        let mut out = Self::zero(n, self.depth)?;
        out.scalar = self.scalar.clone() * other.scalar.clone();
        for k in 1..=self.depth {
            let dst = &mut out.levels[k - 1];
            if !self.scalar.is_zero() {
                for (d, b) in dst.iter_mut().zip(&other.levels[k - 1]) {
                    *d += self.scalar.clone() * b.clone();
                }
            }
            if !other.scalar.is_zero() {
                for (d, a) in dst.iter_mut().zip(&self.levels[k - 1]) {
                    *d += a.clone() * other.scalar.clone();
                }
            }
            for i in 1..k {
                let a = &self.levels[i - 1];
                let b = &other.levels[k - i - 1];
                let stride = b.len();
                for (ia, ca) in a.iter().enumerate() {
                    if ca.is_zero() {
                        continue;
                    }
                    let row = &mut dst[ia * stride..(ia + 1) * stride];
                    for (d, cb) in row.iter_mut().zip(b) {
                        *d += ca.clone() * cb.clone();
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|x| x.clone() * c.clone())
    }

    fn map(&self, f: impl Fn(&T) -> T) -> Self {
        TruncatedTensor {
            n: self.n,
            depth: self.depth,
            scalar: f(&self.scalar),
            levels: self
                .levels
                .iter()
                .map(|l| l.iter().map(&f).collect())
                .collect(),
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&T, &T) -> T) -> Self {
        self.ensure_compatible(other)
            .expect("tensor arithmetic on mismatched shapes");
        TruncatedTensor {
            n: self.n,
            depth: self.depth,
            scalar: f(&self.scalar, &other.scalar),
            levels: self
                .levels
                .iter()
                .zip(&other.levels)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| f(x, y)).collect())
                .collect(),
        }
    }

    /// Truncated exponential. The scalar part must vanish.
    pub fn exp(&self) -> Result<GrouplikeTensor<T>> {
        if !self.scalar.is_zero() {
            return Err(Error::Domain(
                "exp is only defined here for tensors with zero scalar part".into(),
            ));
        }
        let one = Self::one(self.n, self.depth)?;
        let mut acc = one.clone();
        for k in (1..=self.depth).rev() {
            let step = self.mul(&acc)?.scale(&T::from_ratio(1, k as i64));
            acc = &one + &step;
        }
        Ok(GrouplikeTensor(acc))
    }

    /// Truncated logarithm `Σ (-1)^{k+1} (g-1)^k / k`. The scalar part must be one.
    pub fn log(&self) -> Result<Self> {
        let dev = (self.scalar.clone() - T::one()).abs_f64();
        if dev > UNIT_SCALAR_TOL {
            return Err(Error::Domain(format!(
                "log needs scalar part 1, got {:?}",
                self.scalar
            )));
        }
        let mut x = self.clone();
        x.scalar = T::zero();
        let coef = |k: usize| {
            let sign = if k % 2 == 1 { 1 } else { -1 };
            T::from_ratio(sign, k as i64)
        };
        let mut acc = Self::zero(self.n, self.depth)?;
        acc.scalar = coef(self.depth);
        for k in (1..self.depth).rev() {
            acc = x.mul(&acc)?;
            acc.scalar += coef(k);
        }
        x.mul(&acc)
    }

    /// Dilation: level `k` multiplied by `c^k`.
    pub fn dilate(&self, c: &T) -> Self {
        let mut out = self.clone();
        let mut ck = T::one();
        for level in &mut out.levels {
            ck *= c.clone();
            for x in level.iter_mut() {
                *x *= ck.clone();
            }
        }
        out
    }

    /// Truncation to step `depth <= N`.
    pub fn project(&self, depth: usize) -> Result<Self> {
        if depth == 0 || depth > self.depth {
            return Err(Error::arg(format!(
                "cannot project from step {} to step {depth}",
                self.depth
            )));
        }
        let mut out = self.clone();
        out.depth = depth;
        out.levels.truncate(depth);
        Ok(out)
    }

    /// Largest coefficient-wise absolute difference, in `f64`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.ensure_compatible(other)
            .expect("comparing tensors of different shapes");
        let mut m = (self.scalar.clone() - other.scalar.clone()).abs_f64();
        for (a, b) in self.levels.iter().zip(&other.levels) {
            for (x, y) in a.iter().zip(b) {
                m = m.max((x.clone() - y.clone()).abs_f64());
            }
        }
        m
    }

    pub fn to_f64(&self) -> TruncatedTensor<f64> {
        TruncatedTensor {
            n: self.n,
            depth: self.depth,
            scalar: self.scalar.to_f64(),
            levels: self
                .levels
                .iter()
                .map(|l| l.iter().map(Scalar::to_f64).collect())
                .collect(),
        }
    }
}

impl<T: Scalar> Add for &TruncatedTensor<T> {
    type Output = TruncatedTensor<T>;
    fn add(self, rhs: Self) -> TruncatedTensor<T> {
        self.zip_with(rhs, |a, b| a.clone() + b.clone())
    }
}

impl<T: Scalar> Sub for &TruncatedTensor<T> {
    type Output = TruncatedTensor<T>;
    fn sub(self, rhs: Self) -> TruncatedTensor<T> {
        self.zip_with(rhs, |a, b| a.clone() - b.clone())
    }
}

impl<T: Scalar> Neg for &TruncatedTensor<T> {
    type Output = TruncatedTensor<T>;
    fn neg(self) -> TruncatedTensor<T> {
        self.map(|a| -a.clone())
    }
}

impl<T: Scalar> GrouplikeTensor<T> {
    /// Wraps a tensor whose scalar part is one.
    pub fn new(tensor: TruncatedTensor<T>) -> Result<Self> {
        let dev = (tensor.scalar.clone() - T::one()).abs_f64();
        if dev > UNIT_SCALAR_TOL {
            return Err(Error::Domain(format!(
                "grouplike tensors need scalar part 1, got {:?}",
                tensor.scalar
            )));
        }
        Ok(GrouplikeTensor(tensor))
    }

    pub fn identity(n: usize, depth: usize) -> Result<Self> {
        Ok(GrouplikeTensor(TruncatedTensor::one(n, depth)?))
    }

    /// `exp(v)` for a degree-one `v`, level by level: `v^{⊗k}/k!`.
    pub fn exp_vector(v: &[T], depth: usize) -> Result<Self> {
        let mut t = TruncatedTensor::one(v.len(), depth)?;
        t.levels[0].clone_from_slice(v);
        let inv = inverse_factorials::<T>(depth);
        let n = v.len();
        for k in 2..=depth {
            // v^{⊗k}/k! = (v^{⊗(k-1)}/(k-1)!) ⊗ v / k
            let ratio = inv[k].clone() / inv[k - 1].clone();
            let (lower, upper) = t.levels.split_at_mut(k - 1);
            let prev = &lower[k - 2];
            let dst = &mut upper[0];
            for (i, p) in prev.iter().enumerate() {
                let pr = p.clone() * ratio.clone();
                for (j, vj) in v.iter().enumerate() {
                    dst[i * n + j] = pr.clone() * vj.clone();
                }
            }
        }
        Ok(GrouplikeTensor(t))
    }

    pub fn tensor(&self) -> &TruncatedTensor<T> {
        &self.0
    }

    pub fn into_tensor(self) -> TruncatedTensor<T> {
        self.0
    }

    pub fn n(&self) -> usize {
        self.0.n
    }

    pub fn depth(&self) -> usize {
        self.0.depth
    }

    pub fn coefficient(&self, word: &Word) -> T {
        self.0.coefficient(word)
    }

    /// Group product (Chen concatenation).
    pub fn mul(&self, other: &Self) -> Result<Self> {
        Ok(GrouplikeTensor(self.0.mul(&other.0)?))
    }

    /// Group inverse `Σ_k (-1)^k (g-1)^k`.
    pub fn inverse(&self) -> Self {
        let mut x = self.0.clone();
        x.scalar = T::zero();
        let mut acc = TruncatedTensor::one(self.n(), self.depth()).expect("valid shape");
        for _ in 0..self.depth() {
            // acc <- 1 - x ⊗ acc
            let mut next = -&x.mul(&acc).expect("same shape");
            next.scalar += T::one();
            acc = next;
        }
        GrouplikeTensor(acc)
    }

    /// Hall coordinates of `log g`.
    pub fn log(&self) -> Result<LieElement<T>> {
        LieElement::from_tensor(&self.0.log()?)
    }

    pub fn dilate(&self, c: &T) -> Self {
        GrouplikeTensor(self.0.dilate(c))
    }

    pub fn project(&self, depth: usize) -> Result<Self> {
        Ok(GrouplikeTensor(self.0.project(depth)?))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0.max_abs_diff(&other.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::BigRational;

    fn w(v: &[u32]) -> Word {
        Word::from_letters_unchecked(v.to_vec())
    }

    #[test]
    fn product_of_letters() {
        let mut a = TruncatedTensor::<f64>::one(2, 2).unwrap();
        a.set_coefficient(&w(&[1]), 1.0).unwrap();
        let mut b = TruncatedTensor::<f64>::one(2, 2).unwrap();
        b.set_coefficient(&w(&[2]), 1.0).unwrap();
        let c = a.mul(&b).unwrap();
        assert_eq!(c.coefficient(&w(&[1])), 1.0);
        assert_eq!(c.coefficient(&w(&[2])), 1.0);
        assert_eq!(c.coefficient(&w(&[1, 2])), 1.0);
        assert_eq!(c.coefficient(&w(&[2, 1])), 0.0);
        assert_eq!(*c.scalar(), 1.0);
        let one = TruncatedTensor::one(2, 2).unwrap();
        assert_eq!(a.mul(&one).unwrap(), a);
    }

    #[test]
    fn exp_product_exact() {
        type Q = BigRational;
        let e1 = TruncatedTensor::<Q>::from_vector(&[Q::from_int(1), Q::from_int(0)], 3)
            .unwrap()
            .exp()
            .unwrap();
        let e2 = TruncatedTensor::<Q>::from_vector(&[Q::from_int(0), Q::from_int(1)], 3)
            .unwrap()
            .exp()
            .unwrap();
        let g = e1.mul(&e2).unwrap();
        assert_eq!(g.coefficient(&w(&[1, 1, 2])), Q::from_ratio(1, 2));
        assert_eq!(g.coefficient(&w(&[1, 2, 2])), Q::from_ratio(1, 2));
        assert_eq!(g.coefficient(&w(&[2, 1, 1])), Q::from_int(0));
    }

    #[test]
    fn exp_vector_matches_series() {
        let v = [0.3, -1.1, 0.7];
        let a = GrouplikeTensor::exp_vector(&v, 4).unwrap();
        let b = TruncatedTensor::from_vector(&v, 4).unwrap().exp().unwrap();
        assert!(a.max_abs_diff(&b) < 1e-15);
    }

    #[test]
    fn log_rejects_non_unit() {
        let t = TruncatedTensor::<f64>::zero(2, 2).unwrap();
        assert!(matches!(t.log(), Err(Error::Domain(_))));
        assert!(GrouplikeTensor::new(t).is_err());
    }

    #[test]
    fn inverse_is_inverse() {
        let g = GrouplikeTensor::exp_vector(&[0.4, -0.9], 4).unwrap();
        let h = GrouplikeTensor::exp_vector(&[1.3, 0.2], 4).unwrap();
        let gh = g.mul(&h).unwrap();
        let id = gh.mul(&gh.inverse()).unwrap();
        assert!(id.max_abs_diff(&GrouplikeTensor::identity(2, 4).unwrap()) < 1e-14);
    }

    #[test]
    fn mismatched_shapes() {
        let a = TruncatedTensor::<f64>::one(2, 2).unwrap();
        let b = TruncatedTensor::<f64>::one(3, 2).unwrap();
        assert!(matches!(a.mul(&b), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn projection() {
        let g = GrouplikeTensor::exp_vector(&[1.0, 2.0], 3).unwrap();
        let p = g.project(2).unwrap();
        assert_eq!(p.depth(), 2);
        assert_eq!(p.coefficient(&w(&[1, 2])), 1.0);
        assert!(g.project(4).is_err());
    }
}
