//! Sylvester Hadamard matrices and the RIS reflection pattern sets built
//! from their first `K` rows.
//!
//! Patterns are `{+1, -1}` vectors; entry `+1` is a 0 phase shift and `-1`
//! a pi shift at the corresponding RIS element. Two properties carry the
//! whole error analysis: distinct rows are orthogonal, and the entrywise
//! difference of two distinct rows has exactly `n/2` entries equal to
//! `+/-2` and `n/2` zeros.

use alloc::vec::Vec;

use crate::{is_power_of_two, Error, Result};

/// A square `{+1, -1}` matrix with `H H^T = n I`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HadamardMatrix {
    n: usize,
    rows: Vec<Vec<i8>>,
}

impl HadamardMatrix {
    pub fn order(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[i8] {
        &self.rows[i]
    }
}

/// Sylvester's recursive construction: `H_n = H_2 (x) H_{n/2}`, with
/// `H_1 = [1]`. Requires `n` to be a power of two.
pub fn sylvester(n: usize) -> Result<HadamardMatrix> {
    if !is_power_of_two(n) {
        return Err(Error::NotPowerOfTwo { name: "n", value: n });
    }
    let rows = (0..n).map(|i| (0..n).map(|j| entry(i, j)).collect()).collect();
    Ok(HadamardMatrix { n, rows })
}

/// Single entry of the order-`n` Sylvester matrix, generated on the fly:
/// `H[i][j] = (-1)^popcount(i & j)`. Row `i` of any power-of-two order can
/// be streamed from this without materializing the matrix.
pub fn entry(i: usize, j: usize) -> i8 {
    if (i & j).count_ones() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// The `K` reflection patterns of one RIS group of `n` elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternSet {
    n: usize,
    k: usize,
    patterns: Vec<Vec<i8>>,
}

impl PatternSet {
    /// Elements per group.
    pub fn group_size(&self) -> usize {
        self.n
    }

    /// Number of patterns.
    pub fn count(&self) -> usize {
        self.k
    }

    /// Pattern `m` (zero-based).
    pub fn pattern(&self, m: usize) -> &[i8] {
        &self.patterns[m]
    }
}

/// First `K` rows of the order-`n` Sylvester matrix, built without
/// materializing `H_n`: row `m` of `H_K` is repeated `n/K` times as a
/// contiguous block. Equivalently `H_n[m][j] = H_K[m][j mod K]` for
/// `m < K`, a consequence of the Kronecker structure.
pub fn pattern_set(n: usize, k: usize) -> Result<PatternSet> {
    if !is_power_of_two(n) {
        return Err(Error::NotPowerOfTwo { name: "n", value: n });
    }
    if !is_power_of_two(k) {
        return Err(Error::NotPowerOfTwo { name: "K", value: k });
    }
    if k > n {
        return Err(Error::InvalidDimensions { reason: "K must not exceed group size n" });
    }
    let patterns = (0..k)
        .map(|m| (0..n).map(|j| entry(m, j % k)).collect())
        .collect();
    Ok(PatternSet { n, k, patterns })
}

/// Multiset profile of `s_m - s_l`: `(count of +/-2 entries, count of
/// zeros)`. Indices are zero-based.
pub fn difference_profile(set: &PatternSet, m: usize, l: usize) -> Result<(usize, usize)> {
    let k = set.count();
    if m >= k {
        return Err(Error::IndexOutOfRange { index: m, len: k });
    }
    if l >= k {
        return Err(Error::IndexOutOfRange { index: l, len: k });
    }
    let mut nonzero = 0usize;
    let mut zero = 0usize;
    for (a, b) in set.pattern(m).iter().zip(set.pattern(l)) {
        if a == b {
            zero += 1;
        } else {
            nonzero += 1;
        }
    }
    Ok((nonzero, zero))
}
