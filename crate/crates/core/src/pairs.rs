//! Index arithmetic over unordered candidate pairs and triples.
//!
//! Pairs `(i, j)` with `i < j` are laid out lexicographically, which is the
//! order of the strictly-upper-triangular entries read row by row.

use crate::error::{invalid_arg, Result};

/// An unordered candidate pair stored as `(low, high)`.
pub type Pair = (usize, usize);

/// Number of unordered pairs over `n` candidates.
pub const fn num_pairs(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Number of unordered triples over `n` candidates, n(n-1)(n-2)/6.
pub const fn num_triples(n: usize) -> usize {
    if n < 3 {
        0
    } else {
        n * (n - 1) * (n - 2) / 6
    }
}

/// Lexicographic index of the pair `(i, j)`, `i < j < n`.
pub fn pair_index(i: usize, j: usize, n: usize) -> Result<usize> {
    if i >= j || j >= n {
        return Err(invalid_arg(format!(
            "pair ({i}, {j}) is not an ordered pair below n = {n}"
        )));
    }
    Ok(pair_index_unchecked(i, j, n))
}

#[inline]
pub(crate) fn pair_index_unchecked(i: usize, j: usize, n: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

/// Inverse of [`pair_index`].
pub fn pair_at(index: usize, n: usize) -> Pair {
    debug_assert!(index < num_pairs(n));
    let mut rest = index;
    let mut i = 0;
    loop {
        let row = n - i - 1;
        if rest < row {
            return (i, i + 1 + rest);
        }
        rest -= row;
        i += 1;
    }
}

/// Normalizes an unordered pair so the smaller index comes first.
pub fn ordered(a: usize, b: usize) -> Pair {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// All pairs `(i, j)`, `i < j < n`, in index order.
pub fn pairs(n: usize) -> impl Iterator<Item = Pair> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

/// All triples `(i, j, k)`, `i < j < k < n`, in lexicographic order.
pub fn triples(n: usize) -> impl Iterator<Item = (usize, usize, usize)> {
    (0..n).flat_map(move |i| {
        (i + 1..n).flat_map(move |j| (j + 1..n).map(move |k| (i, j, k)))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_index_examples() {
        assert_eq!(pair_index(0, 1, 4).unwrap(), 0);
        assert_eq!(pair_index(2, 3, 4).unwrap(), 5);
        assert_eq!(pair_index(0, 3, 4).unwrap(), 2);
        assert!(pair_index(1, 1, 4).is_err());
        assert!(pair_index(2, 1, 4).is_err());
        assert!(pair_index(0, 4, 4).is_err());
    }

    #[test]
    fn pair_index_is_a_bijection() {
        for n in 2..12 {
            let idx: Vec<usize> = pairs(n).map(|(i, j)| pair_index(i, j, n).unwrap()).collect();
            assert_eq!(idx, (0..num_pairs(n)).collect::<Vec<_>>());
            for (k, p) in pairs(n).enumerate() {
                assert_eq!(pair_at(k, n), p);
            }
        }
    }

    #[test]
    fn triple_count_matches_formula() {
        for n in 0..10 {
            assert_eq!(triples(n).count(), num_triples(n));
        }
        assert_eq!(num_triples(4), 4);
    }
}
