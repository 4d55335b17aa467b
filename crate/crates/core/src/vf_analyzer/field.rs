use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use super::Polynomial;
use crate::free_lie::{hall_basis, Word};
use crate::scalar::Scalar;
use crate::{Error, Result};

/// Vector field `Σ_i V^i(x) ∂_i` with polynomial components.
#[derive(Clone, PartialEq)]
pub struct PolyVectorField<T> {
    components: Vec<Polynomial<T>>,
}

impl<T: Scalar> PolyVectorField<T> {
    pub fn new(components: Vec<Polynomial<T>>) -> Result<Self> {
        let d = components.len();
        if d == 0 {
            return Err(Error::arg("vector fields need at least one component"));
        }
        if let Some(bad) = components.iter().position(|p| p.dim() != d) {
            return Err(Error::arg(format!(
                "component {} has {} variables, expected {d}",
                bad + 1,
                components[bad].dim()
            )));
        }
        Ok(PolyVectorField { components })
    }

    pub fn zero(d: usize) -> Self {
        PolyVectorField {
            components: vec![Polynomial::zero(d); d],
        }
    }

    /// Coordinate field `∂_{i+1}` (0-based `i`).
    pub fn coordinate(d: usize, i: usize) -> Self {
        let mut v = Self::zero(d);
        v.components[i] = Polynomial::constant(d, T::one());
        v
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Polynomial<T>] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &Polynomial<T> {
        &self.components[i]
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Polynomial::is_zero)
    }

    /// The derivation `f ↦ Σ_j V^j ∂_j f`.
    pub fn apply(&self, f: &Polynomial<T>) -> Polynomial<T> {
        let mut acc = Polynomial::zero(self.dim());
        for (j, vj) in self.components.iter().enumerate() {
            if vj.is_zero() {
                continue;
            }
            let df = f.derivative(j);
            if !df.is_zero() {
                acc = acc.add(&vj.mul(&df));
            }
        }
        acc
    }

    /// `[V, W]^i = V(W^i) − W(V^i)`.
    pub fn bracket(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::arg(format!(
                "cannot bracket fields on R^{} and R^{}",
                self.dim(),
                other.dim()
            )));
        }
        let components = (0..self.dim())
            .map(|i| {
                self.apply(&other.components[i])
                    .sub(&other.apply(&self.components[i]))
            })
            .collect();
        Ok(PolyVectorField { components })
    }

    pub fn add(&self, other: &Self) -> Self {
        PolyVectorField {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn scale(&self, c: &T) -> Self {
        PolyVectorField {
            components: self.components.iter().map(|p| p.scale(c)).collect(),
        }
    }

    pub fn eval(&self, x: &[T]) -> Vec<T> {
        self.components.iter().map(|p| p.eval(x)).collect()
    }

    pub fn to_f64(&self) -> PolyVectorField<f64> {
        PolyVectorField {
            components: self.components.iter().map(Polynomial::to_f64).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max)
    }
}

impl PolyVectorField<f64> {
    pub fn eval_f64(&self, x: &[f64]) -> Vec<f64> {
        self.components.iter().map(|p| p.eval_f64(x)).collect()
    }
}

impl<T: Scalar> fmt::Debug for PolyVectorField<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.components).finish()
    }
}

/// Bracket of two fields.
pub fn vf_bracket<T: Scalar>(
    v: &PolyVectorField<T>,
    w: &PolyVectorField<T>,
) -> Result<PolyVectorField<T>> {
    v.bracket(w)
}

/// Frame `V_1, ..., V_n` of polynomial vector fields on `R^d`.
///
/// Bracket fields `V_[I]` are memoised per Lyndon word behind a mutex, so a
/// frame can be shared between threads.
pub struct Frame<T> {
    fields: Vec<PolyVectorField<T>>,
    cache: Mutex<HashMap<Word, Arc<PolyVectorField<T>>>>,
}

impl<T: Scalar> Frame<T> {
    pub fn new(fields: Vec<PolyVectorField<T>>) -> Result<Self> {
        let Some(first) = fields.first() else {
            return Err(Error::arg("a frame needs at least one vector field"));
        };
        let d = first.dim();
        if let Some(bad) = fields.iter().position(|f| f.dim() != d) {
            return Err(Error::arg(format!(
                "field {} lives on R^{}, expected R^{d}",
                bad + 1,
                fields[bad].dim()
            )));
        }
        Ok(Frame {
            fields,
            cache: Mutex::new(HashMap::new()),
        })
    }

    /// Dimension of the underlying space.
    pub fn dim(&self) -> usize {
        self.fields[0].dim()
    }

    /// Number of fields.
    pub fn n(&self) -> usize {
        self.fields.len()
    }

    pub fn fields(&self) -> &[PolyVectorField<T>] {
        &self.fields
    }

    pub fn field(&self, i: usize) -> &PolyVectorField<T> {
        &self.fields[i]
    }

    /// `V_[I]` for a Lyndon word `I`, bracketed by standard factorisation.
    pub fn bracket_word(&self, word: &Word) -> Result<Arc<PolyVectorField<T>>> {
        if let Some(bad) = word.letters().iter().find(|&&l| l as usize > self.n()) {
            return Err(Error::arg(format!(
                "letter {bad} outside 1..={} in {word}",
                self.n()
            )));
        }
        if let Some(v) = self.cache.lock().unwrap().get(word) {
            return Ok(v.clone());
        }
        let field = if word.len() == 1 {
            self.fields[word.letters()[0] as usize - 1].clone()
        } else {
            let basis = hall_basis(self.n(), word.len())?;
            let idx = basis
                .position(word)
                .ok_or_else(|| Error::arg(format!("{word} is not a Lyndon word")))?;
            let (u, v) = basis.element(idx).factors.expect("length >= 2");
            let left = self.bracket_word(basis.word(u))?;
            let right = self.bracket_word(basis.word(v))?;
            left.bracket(&right)?
        };
        let field = Arc::new(field);
        self.cache
            .lock()
            .unwrap()
            .entry(word.clone())
            .or_insert_with(|| field.clone());
        Ok(field)
    }

    /// `V_[I]` for every element of `G(depth)`, in basis order.
    pub fn hall_fields(&self, depth: usize) -> Result<Vec<Arc<PolyVectorField<T>>>> {
        let basis = hall_basis(self.n(), depth)?;
        basis
            .elements()
            .iter()
            .map(|e| self.bracket_word(&e.word))
            .collect()
    }

    /// The composed operator `V_{i_1} ⋯ V_{i_k}` applied to `f`.
    pub fn apply_word(&self, word: &Word, f: &Polynomial<T>) -> Polynomial<T> {
        word.letters()
            .iter()
            .rev()
            .fold(f.clone(), |acc, &l| self.fields[l as usize - 1].apply(&acc))
    }

    pub fn to_f64(&self) -> Frame<f64> {
        Frame::new(self.fields.iter().map(PolyVectorField::to_f64).collect()).expect("same shape")
    }
}

impl<T: Scalar> Clone for Frame<T> {
    fn clone(&self) -> Self {
        Frame {
            fields: self.fields.clone(),
            cache: Mutex::new(self.cache.lock().unwrap().clone()),
        }
    }
}

impl<T: Scalar> PartialEq for Frame<T> {
    fn eq(&self, other: &Self) -> bool {
        self.fields == other.fields
    }
}

impl<T: Scalar> fmt::Debug for Frame<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Frame").field("fields", &self.fields).finish()
    }
}
