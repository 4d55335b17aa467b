use std::collections::HashMap;
use std::fmt;
use std::ops::Range;
use std::sync::{Arc, Mutex, OnceLock};

use super::{check_dims, Word};
use crate::Result;

/// One basis element of `g^N`: a Lyndon word and its standard factorisation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HallElement {
    pub word: Word,
    /// Indices (into the same basis) of the standard factorisation `w = uv`,
    /// `None` for single letters. The element is `[e_[u], e_[v]]`.
    pub factors: Option<(usize, usize)>,
}

/// Lyndon basis of the free nilpotent Lie algebra `g^N(R^n)`.
///
/// Elements are ordered by (length, lexicographic), so the basis of step `N`
/// is a prefix of the basis of step `N + 1`.
pub struct HallBasis {
    n: usize,
    depth: usize,
    elements: Vec<HallElement>,
    grade_starts: Vec<usize>,
    positions: HashMap<Word, usize>,
    expansions: Vec<OnceLock<Vec<(usize, i64)>>>,
}

/// Expansion `e_[I] = Σ_K α_I^K e_K` of a basis element in the word basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BracketExpansion {
    pub terms: Vec<(Word, i64)>,
}

impl BracketExpansion {
    pub fn coefficient(&self, word: &Word) -> i64 {
        self.terms
            .iter()
            .find(|(w, _)| w == word)
            .map_or(0, |(_, c)| *c)
    }
}

/// Dimension of the degree-`k` part of the free Lie algebra on `n` letters,
/// `(1/k) Σ_{d|k} μ(d) n^{k/d}`.
pub fn witt_dimension(n: usize, k: usize) -> usize {
    assert!(k >= 1);
    let mut acc: i128 = 0;
    for d in 1..=k {
        if k % d == 0 {
            acc += mobius(d) as i128 * (n as i128).pow((k / d) as u32);
        }
    }
    (acc / k as i128) as usize
}

fn mobius(mut m: usize) -> i32 {
    let mut sign = 1;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            m /= p;
            if m % p == 0 {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if m > 1 {
        sign = -sign;
    }
    sign
}

/// Lyndon words of length `<= depth` over `1..=n`, in lexicographic order
/// (Duval's generation).
fn lyndon_words(n: usize, depth: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut w: Vec<u32> = vec![1];
    loop {
        out.push(w.clone());
        let m = w.len();
        while w.len() < depth {
            let c = w[w.len() - m];
            w.push(c);
        }
        while w.last() == Some(&(n as u32)) {
            w.pop();
        }
        match w.last_mut() {
            Some(last) => *last += 1,
            None => break,
        }
    }
    out
}

/// Shared, memoised Lyndon basis for `(n, N)`.
pub fn hall_basis(n: usize, depth: usize) -> Result<Arc<HallBasis>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<HallBasis>>>> = OnceLock::new();
    check_dims(n, depth)?;
    let cache = CACHE.get_or_init(Default::default);
    if let Some(b) = cache.lock().unwrap().get(&(n, depth)) {
        return Ok(b.clone());
    }
    let basis = Arc::new(HallBasis::new(n, depth)?);
    cache
        .lock()
        .unwrap()
        .entry((n, depth))
        .or_insert_with(|| basis.clone());
    Ok(basis)
}

impl HallBasis {
    pub fn new(n: usize, depth: usize) -> Result<Self> {
        check_dims(n, depth)?;
        let mut words = lyndon_words(n, depth);
        words.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));

        let mut elements: Vec<HallElement> = Vec::with_capacity(words.len());
        let mut positions: HashMap<Word, usize> = HashMap::with_capacity(words.len());
        let mut grade_starts = vec![0usize; depth + 2];
        for letters in words {
            let len = letters.len();
            let factors = if len == 1 {
                None
            } else {
                // Standard factorisation: v is the longest proper Lyndon suffix.
                let split = (1..len)
                    .find(|&s| positions.contains_key(&Word::from_letters_unchecked(letters[s..].to_vec())))
                    .expect("every Lyndon word of length >= 2 has a Lyndon suffix");
                let u = positions[&Word::from_letters_unchecked(letters[..split].to_vec())];
                let v = positions[&Word::from_letters_unchecked(letters[split..].to_vec())];
                Some((u, v))
            };
            let word = Word::from_letters_unchecked(letters);
            positions.insert(word.clone(), elements.len());
            elements.push(HallElement { word, factors });
            grade_starts[len + 1] = elements.len();
        }
        for k in 1..grade_starts.len() {
            grade_starts[k] = grade_starts[k].max(grade_starts[k - 1]);
        }
        let expansions = (0..elements.len()).map(|_| OnceLock::new()).collect();
        Ok(HallBasis {
            n,
            depth,
            elements,
            grade_starts,
            positions,
            expansions,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[HallElement] {
        &self.elements
    }

    pub fn element(&self, index: usize) -> &HallElement {
        &self.elements[index]
    }

    pub fn word(&self, index: usize) -> &Word {
        &self.elements[index].word
    }

    /// Length of the word of element `index`.
    pub fn grade(&self, index: usize) -> usize {
        self.elements[index].word.len()
    }

    /// Index range of the elements of length exactly `k`.
    pub fn grade_range(&self, k: usize) -> Range<usize> {
        assert!((1..=self.depth).contains(&k));
        self.grade_starts[k]..self.grade_starts[k + 1]
    }

    /// Number of elements of length `<= k`, i.e. `dim g^k`.
    pub fn dimension_through(&self, k: usize) -> usize {
        self.grade_starts[k.min(self.depth) + 1]
    }

    /// Number of elements at each length `1..=N`.
    pub fn grade_sizes(&self) -> Vec<usize> {
        (1..=self.depth).map(|k| self.grade_range(k).len()).collect()
    }

    pub fn position(&self, word: &Word) -> Option<usize> {
        self.positions.get(word).copied()
    }

    /// The same basis truncated to step `depth <= N`.
    pub fn truncated(&self, depth: usize) -> Result<Arc<HallBasis>> {
        if depth > self.depth {
            return Err(crate::Error::arg(format!(
                "cannot project from step {} to larger step {depth}",
                self.depth
            )));
        }
        hall_basis(self.n, depth)
    }

    /// Sparse expansion of element `index` at its level: pairs of
    /// (level index, integer coefficient), sorted by level index.
    pub fn expansion(&self, index: usize) -> &[(usize, i64)] {
        self.expansions[index].get_or_init(|| {
            let el = &self.elements[index];
            match el.factors {
                None => vec![(el.word.level_index(self.n), 1)],
                Some((u, v)) => {
                    let shift_v = self.n.pow(self.grade(v) as u32);
                    let shift_u = self.n.pow(self.grade(u) as u32);
                    let mut acc: HashMap<usize, i64> = HashMap::new();
                    for &(iu, cu) in self.expansion(u) {
                        for &(iv, cv) in self.expansion(v) {
                            *acc.entry(iu * shift_v + iv).or_default() += cu * cv;
                            *acc.entry(iv * shift_u + iu).or_default() -= cu * cv;
                        }
                    }
                    let mut terms: Vec<(usize, i64)> =
                        acc.into_iter().filter(|&(_, c)| c != 0).collect();
                    terms.sort_unstable();
                    terms
                }
            }
        })
    }

    pub fn bracket_expansion(&self, index: usize) -> BracketExpansion {
        let k = self.grade(index);
        BracketExpansion {
            terms: self
                .expansion(index)
                .iter()
                .map(|&(i, c)| (Word::from_level_index(i, k, self.n), c))
                .collect(),
        }
    }

    /// Bracketing of element `index`, e.g. `[1,[1,2]]`.
    pub fn bracket_string(&self, index: usize) -> String {
        match self.elements[index].factors {
            None => self.elements[index].word.letters()[0].to_string(),
            Some((u, v)) => format!("[{},{}]", self.bracket_string(u), self.bracket_string(v)),
        }
    }
}

impl fmt::Debug for HallBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HallBasis")
            .field("n", &self.n)
            .field("depth", &self.depth)
            .field("len", &self.elements.len())
            .finish()
    }
}

impl PartialEq for HallBasis {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.depth == other.depth
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words(b: &HallBasis) -> Vec<Vec<u32>> {
        b.elements().iter().map(|e| e.word.letters().to_vec()).collect()
    }

    #[test]
    fn two_letters_step_two() {
        let b = HallBasis::new(2, 2).unwrap();
        assert_eq!(words(&b), vec![vec![1], vec![2], vec![1, 2]]);
    }

    #[test]
    fn abelian_case_has_only_the_letter() {
        let b = HallBasis::new(1, 3).unwrap();
        assert_eq!(words(&b), vec![vec![1]]);
        assert_eq!(b.grade_sizes(), vec![1, 0, 0]);
    }

    #[test]
    fn grading_n2_n5() {
        let b = HallBasis::new(2, 5).unwrap();
        assert_eq!(b.grade_sizes(), vec![2, 1, 2, 3, 6]);
        assert_eq!(b.len(), 14);
    }

    #[test]
    fn witt_numbers() {
        assert_eq!(witt_dimension(2, 6), 9);
        assert_eq!(witt_dimension(3, 4), 18);
        assert_eq!(witt_dimension(4, 1), 4);
    }

    #[test]
    fn standard_factorisation() {
        let b = HallBasis::new(2, 4).unwrap();
        let idx = b.position(&Word::new(vec![1, 1, 2], 2).unwrap()).unwrap();
        assert_eq!(b.bracket_string(idx), "[1,[1,2]]");
        let idx = b.position(&Word::new(vec![1, 2, 2], 2).unwrap()).unwrap();
        assert_eq!(b.bracket_string(idx), "[[1,2],2]");
        let idx = b.position(&Word::new(vec![1, 1, 2, 2], 2).unwrap()).unwrap();
        assert_eq!(b.bracket_string(idx), "[1,[[1,2],2]]");
    }

    #[test]
    fn expansions() {
        let b = HallBasis::new(2, 3).unwrap();
        let w = |v: Vec<u32>| Word::new(v, 2).unwrap();
        let e1 = b.bracket_expansion(0);
        assert_eq!(e1.terms, vec![(w(vec![1]), 1)]);
        let e12 = b.bracket_expansion(b.position(&w(vec![1, 2])).unwrap());
        assert_eq!(e12.coefficient(&w(vec![1, 2])), 1);
        assert_eq!(e12.coefficient(&w(vec![2, 1])), -1);
        let e122 = b.bracket_expansion(b.position(&w(vec![1, 2, 2])).unwrap());
        assert_eq!(e122.coefficient(&w(vec![1, 2, 2])), 1);
        assert_eq!(e122.coefficient(&w(vec![2, 1, 2])), -2);
        assert_eq!(e122.coefficient(&w(vec![2, 2, 1])), 1);
        assert_eq!(e122.terms.len(), 3);
    }

    #[test]
    fn lyndon_triangularity() {
        // The leading word of each expansion is the Lyndon word itself.
        let b = HallBasis::new(3, 4).unwrap();
        for i in 0..b.len() {
            let first = b.expansion(i)[0];
            assert_eq!(first, (b.word(i).level_index(3), 1));
        }
    }

    #[test]
    fn extension_is_stable() {
        let small = HallBasis::new(3, 3).unwrap();
        let big = HallBasis::new(3, 5).unwrap();
        assert_eq!(words(&small)[..], words(&big)[..small.len()]);
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(HallBasis::new(0, 2).is_err());
        assert!(HallBasis::new(2, 0).is_err());
        assert!(matches!(HallBasis::new(10, 8), Err(crate::Error::Resource(_))));
    }
}
