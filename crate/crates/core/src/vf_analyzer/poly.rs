use std::collections::BTreeMap;
use std::fmt;

use crate::scalar::Scalar;
use crate::{Error, Result};

/// Polynomial in `d` real variables, stored as exponent vector -> coefficient.
///
/// Zero coefficients are never stored, so structural equality is equality of
/// polynomials.
#[derive(Clone, PartialEq)]
pub struct Polynomial<T> {
    d: usize,
    terms: BTreeMap<Vec<u32>, T>,
}

impl<T: Scalar> Polynomial<T> {
    pub fn zero(d: usize) -> Self {
        Polynomial {
            d,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(d: usize, c: T) -> Self {
        Self::monomial(d, vec![0; d], c)
    }

    /// The coordinate function `x_{i+1}` (0-based `i`).
    pub fn var(d: usize, i: usize) -> Self {
        assert!(i < d, "variable index {i} out of range for d = {d}");
        let mut e = vec![0; d];
        e[i] = 1;
        Self::monomial(d, e, T::one())
    }

    pub fn monomial(d: usize, exponents: Vec<u32>, c: T) -> Self {
        assert_eq!(exponents.len(), d);
        let mut p = Self::zero(d);
        if !c.is_zero() {
            p.terms.insert(exponents, c);
        }
        p
    }

    pub fn from_terms(d: usize, terms: impl IntoIterator<Item = (Vec<u32>, T)>) -> Result<Self> {
        let mut p = Self::zero(d);
        for (e, c) in terms {
            if e.len() != d {
                return Err(Error::arg(format!(
                    "exponent vector of length {} in a polynomial of {d} variables",
                    e.len()
                )));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, e: Vec<u32>, c: T) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, T> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of the monomial with the given exponents.
    pub fn coefficient(&self, exponents: &[u32]) -> T {
        self.terms.get(exponents).cloned().unwrap_or_else(T::zero)
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum())
            .max()
            .unwrap_or(0)
    }

    fn check_dim(&self, other: &Self) {
        assert_eq!(self.d, other.d, "polynomials in different numbers of variables");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_dim(other);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-T::one()))
    }

    pub fn scale(&self, c: &T) -> Self {
        let mut out = Self::zero(self.d);
        if c.is_zero() {
            return out;
        }
        for (e, a) in &self.terms {
            out.add_term(e.clone(), a.clone() * c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_dim(other);
        let mut out = Self::zero(self.d);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca.clone() * cb.clone());
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(self.d, T::one());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// `∂/∂x_{j+1}` (0-based `j`).
    pub fn derivative(&self, j: usize) -> Self {
        let mut out = Self::zero(self.d);
        for (e, c) in &self.terms {
            if e[j] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[j] -= 1;
            out.add_term(e2, c.clone() * T::from_int(e[j] as i64));
        }
        out
    }

    pub fn eval(&self, x: &[T]) -> T {
        assert_eq!(x.len(), self.d, "evaluation point has the wrong dimension");
        let mut acc = T::zero();
        for (e, c) in &self.terms {
            let mut m = c.clone();
            for (xi, &k) in x.iter().zip(e) {
                if k > 0 {
                    m *= xi.powu(k as usize);
                }
            }
            acc += m;
        }
        acc
    }

    pub fn to_f64(&self) -> Polynomial<f64> {
        Polynomial {
            d: self.d,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), c.to_f64()))
                .filter(|(_, c)| *c != 0.0)
                .collect(),
        }
    }

    /// Largest absolute coefficient difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.sub(other)
            .terms
            .values()
            .map(Scalar::abs_f64)
            .fold(0.0, f64::max)
    }
}

impl Polynomial<f64> {
    /// Fast `f64` evaluation with per-variable power tables.
    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (e, c) in &self.terms {
            let mut m = *c;
            for (xi, &k) in x.iter().zip(e) {
                match k {
                    0 => {}
                    1 => m *= xi,
                    2 => m *= xi * xi,
                    _ => m *= xi.powi(k as i32),
                }
            }
            acc += m;
        }
        acc
    }
}

impl<T: Scalar + fmt::Display> fmt::Display for Polynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            for (i, &p) in e.iter().enumerate() {
                match p {
                    0 => {}
                    1 => write!(f, "*x{}", i + 1)?,
                    _ => write!(f, "*x{}^{p}", i + 1)?,
                }
            }
        }
        Ok(())
    }
}

impl<T: Scalar> fmt::Debug for Polynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.terms.iter().map(|(e, c)| (e, c)))
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::BigRational;

    #[test]
    fn arithmetic() {
        let x1 = Polynomial::<f64>::var(2, 0);
        let x2 = Polynomial::<f64>::var(2, 1);
        let s = x1.add(&x2).pow(2);
        assert_eq!(s.coefficient(&[2, 0]), 1.0);
        assert_eq!(s.coefficient(&[1, 1]), 2.0);
        assert_eq!(s.coefficient(&[0, 2]), 1.0);
        assert_eq!(s.terms().len(), 3);
        assert!(x1.sub(&x1).is_zero());
        assert_eq!(s.eval(&[1.0, 2.0]), 9.0);
        assert_eq!(s.eval_f64(&[1.0, 2.0]), 9.0);
        assert_eq!(s.degree(), 2);
    }

    #[test]
    fn derivatives_exact() {
        type Q = BigRational;
        let x = Polynomial::<Q>::var(3, 0);
        let y = Polynomial::<Q>::var(3, 2);
        let p = x.pow(3).mul(&y).scale(&Q::from_ratio(1, 3));
        let dp = p.derivative(0);
        assert_eq!(dp, x.pow(2).mul(&y));
        assert!(p.derivative(1).is_zero());
    }
}
