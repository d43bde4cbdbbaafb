//! Permutation helpers.

use alloc::vec::Vec;

/// `n!` as `u64`; `None` on overflow.
pub fn factorial(n: usize) -> Option<u64> {
    (1..=n as u64).try_fold(1u64, |acc, x| acc.checked_mul(x))
}

/// Rearranges `v` into the next permutation in lexicographic order.
/// Returns `false` (leaving `v` sorted ascending) after the last one.
pub fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        v.reverse();
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// True iff `perm` is a permutation of `base..base+len`.
pub fn is_permutation_from(perm: &[usize], base: usize) -> bool {
    let n = perm.len();
    let mut seen = alloc::vec![false; n];
    for &x in perm {
        if x < base || x - base >= n || seen[x - base] {
            return false;
        }
        seen[x - base] = true;
    }
    true
}

/// Inverse of a permutation of `1..=n` (1-based values).
pub fn inverse_one_based(perm: &[usize]) -> Vec<usize> {
    let mut inv = alloc::vec![0; perm.len()];
    for (t, &x) in perm.iter().enumerate() {
        inv[x - 1] = t + 1;
    }
    inv
}

/// Relative ranks (1-based) of distinct values.
pub fn rank_reduce<T: Ord + Copy>(values: &[T]) -> Vec<u32> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by_key(|&i| values[i]);
    let mut out = alloc::vec![0u32; values.len()];
    for (r, &i) in idx.iter().enumerate() {
        out[i] = r as u32 + 1;
    }
    out
}

/// Visits every permutation of `0..n` in lexicographic order.
pub fn for_each_permutation(n: usize, mut f: impl FnMut(&[u32])) {
    let mut v: Vec<u32> = (0..n as u32).collect();
    loop {
        f(&v);
        if !next_permutation(&mut v) {
            break;
        }
    }
}
