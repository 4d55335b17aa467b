//! Truncated tensor algebra `T^N(R^n)` and the free nilpotent Lie algebra
//! `g^N(R^n)` it contains.
//!
//! Words use 1-based letters. Tensors are stored densely level by level, a
//! word of length `k` living at the big-endian base-`n` index of its letters,
//! so lexicographic order on words of equal length is index order. Lie
//! elements carry coordinates in the Lyndon basis with standard-factorisation
//! bracketing (see [`HallBasis`]).

mod hall;
mod lie;
mod tensor;
mod word;

pub use hall::{hall_basis, witt_dimension, BracketExpansion, HallBasis, HallElement};
pub use lie::{bch, LieElement};
pub use tensor::{GrouplikeTensor, TruncatedTensor};
pub use word::Word;

/// Largest admissible `Σ_{k≤N} n^k`.
pub const MAX_TENSOR_COEFFICIENTS: usize = 10_000_000;

/// Number of coefficients of `T^N(R^n)` excluding the scalar, or `None` once it
/// exceeds [`MAX_TENSOR_COEFFICIENTS`].
pub(crate) fn checked_tensor_size(n: usize, depth: usize) -> Option<usize> {
    let mut total = 0usize;
    let mut level = 1usize;
    for _ in 0..depth {
        level = level.checked_mul(n)?;
        total = total.checked_add(level)?;
        if total > MAX_TENSOR_COEFFICIENTS {
            return None;
        }
    }
    Some(total)
}

pub(crate) fn check_dims(n: usize, depth: usize) -> crate::Result<()> {
    if n == 0 {
        return Err(crate::Error::arg("alphabet size must be at least 1"));
    }
    if depth == 0 {
        return Err(crate::Error::arg("truncation step must be at least 1"));
    }
    if checked_tensor_size(n, depth).is_none() {
        return Err(crate::Error::Resource(format!(
            "T^{depth}(R^{n}) has more than {MAX_TENSOR_COEFFICIENTS} coefficients"
        )));
    }
    Ok(())
}
