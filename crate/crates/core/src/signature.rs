//! Signatures of piecewise-linear paths.
//!
//! The signature of a piecewise-linear path is the tensor product of the
//! exponentials of its increments, which is exact at any truncation step.

use crate::free_lie::{GrouplikeTensor, LieElement};
use crate::scalar::Scalar;
use crate::{Error, Result};

/// Piecewise-linear path in `R^n` with strictly increasing time stamps.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseLinearPath<T> {
    times: Vec<T>,
    vertices: Vec<Vec<T>>,
}

impl<T: Scalar> PiecewiseLinearPath<T> {
    pub fn new(times: Vec<T>, vertices: Vec<Vec<T>>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::arg("a path needs at least two vertices"));
        }
        if times.len() != vertices.len() {
            return Err(Error::arg(format!(
                "{} time stamps for {} vertices",
                times.len(),
                vertices.len()
            )));
        }
        let n = vertices[0].len();
        if n == 0 {
            return Err(Error::arg("paths must live in R^n with n >= 1"));
        }
        if vertices.iter().any(|v| v.len() != n) {
            return Err(Error::arg("vertices have inconsistent dimensions"));
        }
        if times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::arg("time stamps must be strictly increasing"));
        }
        Ok(PiecewiseLinearPath { times, vertices })
    }

    /// Path through `vertices` at the uniform times `0, 1/m, ..., 1`.
    pub fn from_vertices(vertices: Vec<Vec<T>>) -> Result<Self> {
        let m = vertices.len().saturating_sub(1).max(1) as i64;
        let times = (0..vertices.len() as i64)
            .map(|j| T::from_ratio(j, m))
            .collect();
        Self::new(times, vertices)
    }

    /// Path starting at the origin with the given increments, uniform times.
    pub fn from_increments(increments: &[Vec<T>]) -> Result<Self> {
        let n = increments.first().map_or(0, Vec::len);
        let mut vertices = vec![vec![T::zero(); n]];
        for inc in increments {
            let last = vertices.last().unwrap();
            if inc.len() != n {
                return Err(Error::arg("increments have inconsistent dimensions"));
            }
            let next = last.iter().zip(inc).map(|(a, b)| a.clone() + b.clone()).collect();
            vertices.push(next);
        }
        Self::from_vertices(vertices)
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn segments(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn vertices(&self) -> &[Vec<T>] {
        &self.vertices
    }

    pub fn start(&self) -> &[T] {
        &self.vertices[0]
    }

    pub fn end(&self) -> &[T] {
        self.vertices.last().unwrap()
    }

    /// Increment of segment `j`.
    pub fn increment(&self, j: usize) -> Vec<T> {
        self.vertices[j + 1]
            .iter()
            .zip(&self.vertices[j])
            .map(|(b, a)| b.clone() - a.clone())
            .collect()
    }

    pub fn increments(&self) -> Vec<Vec<T>> {
        (0..self.segments()).map(|j| self.increment(j)).collect()
    }

    /// Same trace run backwards.
    pub fn reversed(&self) -> Self {
        let t_end = self.times.last().unwrap().clone();
        let t0 = self.times[0].clone();
        let times = self
            .times
            .iter()
            .rev()
            .map(|t| t0.clone() + t_end.clone() - t.clone())
            .collect();
        let vertices = self.vertices.iter().rev().cloned().collect();
        PiecewiseLinearPath { times, vertices }
    }

    /// `self` followed by `other`, translated so that it starts where `self`
    /// ends and shifted in time.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::arg("cannot concatenate paths of different dimensions"));
        }
        let shift: Vec<T> = self
            .end()
            .iter()
            .zip(other.start())
            .map(|(a, b)| a.clone() - b.clone())
            .collect();
        let dt = self.times.last().unwrap().clone() - other.times[0].clone();
        let mut times = self.times.clone();
        let mut vertices = self.vertices.clone();
        for (t, v) in other.times.iter().zip(&other.vertices).skip(1) {
            times.push(t.clone() + dt.clone());
            vertices.push(v.iter().zip(&shift).map(|(a, s)| a.clone() + s.clone()).collect());
        }
        Ok(PiecewiseLinearPath { times, vertices })
    }

    /// The pieces before and after vertex `j` (`0 < j < len - 1`).
    pub fn split_at(&self, j: usize) -> Result<(Self, Self)> {
        if j == 0 || j >= self.segments() {
            return Err(Error::arg(format!(
                "split vertex {j} must be interior (1..{})",
                self.segments()
            )));
        }
        let first = PiecewiseLinearPath {
            times: self.times[..=j].to_vec(),
            vertices: self.vertices[..=j].to_vec(),
        };
        let second = PiecewiseLinearPath {
            times: self.times[j..].to_vec(),
            vertices: self.vertices[j..].to_vec(),
        };
        Ok((first, second))
    }

    /// Pointwise scaling of the trace.
    pub fn scaled(&self, c: &T) -> Self {
        let vertices = self
            .vertices
            .iter()
            .map(|v| v.iter().map(|a| a.clone() * c.clone()).collect())
            .collect();
        PiecewiseLinearPath {
            times: self.times.clone(),
            vertices,
        }
    }

    /// Pointwise negation `w -> -w`.
    pub fn negated(&self) -> Self {
        self.scaled(&-T::one())
    }

    /// Same vertices at new time stamps.
    pub fn with_times(&self, times: Vec<T>) -> Result<Self> {
        Self::new(times, self.vertices.clone())
    }

    /// Inserts the midpoint of every segment.
    pub fn refined(&self) -> Self {
        let half = T::from_ratio(1, 2);
        let mut times = vec![self.times[0].clone()];
        let mut vertices = vec![self.vertices[0].clone()];
        for j in 0..self.segments() {
            let tm = (self.times[j].clone() + self.times[j + 1].clone()) * half.clone();
            let vm = self.vertices[j]
                .iter()
                .zip(&self.vertices[j + 1])
                .map(|(a, b)| (a.clone() + b.clone()) * half.clone())
                .collect();
            times.push(tm);
            vertices.push(vm);
            times.push(self.times[j + 1].clone());
            vertices.push(self.vertices[j + 1].clone());
        }
        PiecewiseLinearPath { times, vertices }
    }
}

/// Signature of `path` truncated at step `depth`.
pub fn pwl_signature<T: Scalar>(
    path: &PiecewiseLinearPath<T>,
    depth: usize,
) -> Result<GrouplikeTensor<T>> {
    let mut sig = GrouplikeTensor::identity(path.dim(), depth)?;
    for inc in path.increments() {
        sig = sig.mul(&GrouplikeTensor::exp_vector(&inc, depth)?)?;
    }
    Ok(sig)
}

/// Hall coordinates of the log-signature.
pub fn log_signature<T: Scalar>(
    path: &PiecewiseLinearPath<T>,
    depth: usize,
) -> Result<LieElement<T>> {
    pwl_signature(path, depth)?.log()
}

/// Chen concatenation of two signatures.
pub fn chen_concat<T: Scalar>(
    s1: &GrouplikeTensor<T>,
    s2: &GrouplikeTensor<T>,
) -> Result<GrouplikeTensor<T>> {
    s1.mul(s2)
}

/// Lévy area `½∫(x¹dx² − x²dx¹)` of a planar path, measured from its start
/// point, so that it equals `½(S^{12} − S^{21})` of the signature.
pub fn levy_area<T: Scalar>(path: &PiecewiseLinearPath<T>) -> Result<T> {
    if path.dim() != 2 {
        return Err(Error::arg(format!(
            "Lévy area needs a planar path, got dimension {}",
            path.dim()
        )));
    }
    let x0 = path.start();
    let mut acc = T::zero();
    for j in 0..path.segments() {
        let p = &path.vertices[j];
        let q = &path.vertices[j + 1];
        let (a1, a2) = (p[0].clone() - x0[0].clone(), p[1].clone() - x0[1].clone());
        let (d1, d2) = (q[0].clone() - p[0].clone(), q[1].clone() - p[1].clone());
        acc += a1 * d2 - a2 * d1;
    }
    Ok(acc * T::from_ratio(1, 2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_lie::Word;
    use crate::BigRational;

    #[test]
    fn single_segment_is_exp() {
        let p = PiecewiseLinearPath::from_vertices(vec![vec![0.0f64, 0.0], vec![0.5, -2.0]]).unwrap();
        let s = pwl_signature(&p, 3).unwrap();
        let e = GrouplikeTensor::exp_vector(&[0.5, -2.0], 3).unwrap();
        assert!(s.max_abs_diff(&e) < 1e-15);
        let l = log_signature(&p, 3).unwrap();
        assert!((l.coeffs()[0] - 0.5).abs() < 1e-15);
        assert!((l.coeffs()[1] + 2.0).abs() < 1e-15);
        assert!(l.coeffs()[2..].iter().all(|c| c.abs() < 1e-15));
    }

    #[test]
    fn one_dimensional_time_path() {
        let p = PiecewiseLinearPath::from_vertices(vec![vec![0.0], vec![1.0]]).unwrap();
        let s = pwl_signature(&p, 2).unwrap();
        assert_eq!(s.coefficient(&Word::new(vec![1, 1], 1).unwrap()), 0.5);
    }

    #[test]
    fn corner_path_exact() {
        type Q = BigRational;
        let z = Q::from_int(0);
        let o = Q::from_int(1);
        let p = PiecewiseLinearPath::from_vertices(vec![
            vec![z.clone(), z.clone()],
            vec![o.clone(), z.clone()],
            vec![o.clone(), o.clone()],
        ])
        .unwrap();
        let s = pwl_signature(&p, 2).unwrap();
        let w12 = Word::new(vec![1, 2], 2).unwrap();
        let w21 = Word::new(vec![2, 1], 2).unwrap();
        assert_eq!(s.coefficient(&w12), o);
        assert_eq!(s.coefficient(&w21), z);
        let l = log_signature(&p, 2).unwrap();
        assert_eq!(l.coefficient(&w12).unwrap(), &Q::from_ratio(1, 2));
    }

    #[test]
    fn reversal_and_concat() {
        let p = PiecewiseLinearPath::from_vertices(vec![
            vec![0.0f64, 0.0, 0.0],
            vec![1.0, 0.5, -0.2],
            vec![0.3, 1.1, 0.4],
        ])
        .unwrap();
        let a = log_signature(&p, 4).unwrap();
        let b = log_signature(&p.reversed(), 4).unwrap();
        assert!((&a + &b).coeffs().iter().all(|c| c.abs() < 1e-13));
        let loop_sig = pwl_signature(&p.concat(&p.reversed()).unwrap(), 4).unwrap();
        assert!(loop_sig.max_abs_diff(&GrouplikeTensor::identity(3, 4).unwrap()) < 1e-13);
    }

    #[test]
    fn levy_areas() {
        let diag = PiecewiseLinearPath::from_vertices(vec![vec![0.0, 0.0], vec![1.0, 1.0]]).unwrap();
        assert_eq!(levy_area(&diag).unwrap(), 0.0);
        let square = PiecewiseLinearPath::from_vertices(vec![
            vec![0.0f64, 0.0],
            vec![1.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
            vec![0.0, 0.0],
        ])
        .unwrap();
        assert!((levy_area(&square).unwrap() - 1.0).abs() < 1e-15);
        let p3 = PiecewiseLinearPath::from_vertices(vec![vec![0.0; 3], vec![1.0; 3]]).unwrap();
        assert!(levy_area(&p3).is_err());
    }

    #[test]
    fn invalid_paths() {
        assert!(PiecewiseLinearPath::<f64>::from_vertices(vec![vec![0.0]]).is_err());
        assert!(PiecewiseLinearPath::new(vec![0.0, 0.0], vec![vec![0.0], vec![1.0]]).is_err());
    }
}
