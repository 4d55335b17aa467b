use std::cmp::Ordering;
use std::fmt;

use crate::{Error, Result};

/// Non-empty word over the letters `1..=n`.
///
/// Ordered by length first, then lexicographically.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Word(Vec<u32>);

impl Word {
    pub fn new(letters: Vec<u32>, n: usize) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::arg("words must be non-empty"));
        }
        if let Some(&bad) = letters.iter().find(|&&l| l == 0 || l as usize > n) {
            return Err(Error::arg(format!("letter {bad} outside 1..={n}")));
        }
        Ok(Word(letters))
    }

    pub(crate) fn from_letters_unchecked(letters: Vec<u32>) -> Self {
        debug_assert!(!letters.is_empty());
        Word(letters)
    }

    pub fn letter(i: u32) -> Self {
        Word(vec![i])
    }

    pub fn letters(&self) -> &[u32] {
        &self.0
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Position of this word inside its tensor level.
    pub fn level_index(&self, n: usize) -> usize {
        self.0
            .iter()
            .fold(0usize, |acc, &l| acc * n + (l as usize - 1))
    }

    /// Inverse of [`Word::level_index`].
    pub fn from_level_index(mut index: usize, len: usize, n: usize) -> Self {
        let mut letters = vec![0u32; len];
        for slot in letters.iter_mut().rev() {
            *slot = (index % n) as u32 + 1;
            index /= n;
        }
        Word(letters)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.0.clone();
        letters.extend_from_slice(&other.0);
        Word(letters)
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_is_length_first() {
        let a = Word::new(vec![2], 2).unwrap();
        let b = Word::new(vec![1, 1], 2).unwrap();
        assert!(a < b);
        let c = Word::new(vec![1, 2], 2).unwrap();
        assert!(b < c);
    }

    #[test]
    fn level_index_roundtrip() {
        for idx in 0..27 {
            let w = Word::from_level_index(idx, 3, 3);
            assert_eq!(w.level_index(3), idx);
        }
        assert_eq!(Word::new(vec![1, 2], 2).unwrap().level_index(2), 1);
    }

    #[test]
    fn rejects_bad_letters() {
        assert!(Word::new(vec![], 2).is_err());
        assert!(Word::new(vec![3], 2).is_err());
        assert!(Word::new(vec![0], 2).is_err());
    }
}
