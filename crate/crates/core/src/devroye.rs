//! Uniform-stamp representation of fringe subtrees.
//!
//! Positions carry distinct ranks. In the linear form of a tree with `m`
//! stamped nodes the ranks sit at positions `1..=m` and positions `0` and
//! `m + 1` hold the sentinel rank `-1`, smaller than every stamp. In the
//! cyclic form a [`StampCircle`] of period `p` is read modulo `p`.
//!
//! `I(i, k) = 1` iff the two ranks at `i - 1` and `i + k` are both below every
//! rank strictly between them: then positions `i..i+k-1` form a fringe
//! subtree of the binary search tree. `J(i, k-1) = 1` iff
//! `U[i-1] <= U[i+k-1] < min U[i..i+k-2]` (empty minimum is `+inf`): then
//! positions `i..i+k-2` form a left-rooted fringe subtree (or the whole
//! tree), which under rotation is a fringe subtree of size `k` of the
//! recursive tree.

use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::perm::{is_permutation_from, rank_reduce};
use crate::rational::Value;
use crate::trees::{rotation_to_ordered, BinaryTree, Fringe, TollFunction, TreeMode, TreeRef};

/// Ranks `0..p` arranged on a circle of period `p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StampCircle {
    ranks: Vec<u32>,
}

impl StampCircle {
    pub fn new(ranks: Vec<u32>) -> Result<Self> {
        let as_usize: Vec<usize> = ranks.iter().map(|&r| r as usize).collect();
        if ranks.is_empty() || !is_permutation_from(&as_usize, 0) {
            return Err(invalid("stamp circle must be a permutation of 0..p"));
        }
        Ok(StampCircle { ranks })
    }

    pub fn period(&self) -> usize {
        self.ranks.len()
    }

    pub fn ranks(&self) -> &[u32] {
        &self.ranks
    }

    #[inline]
    pub fn index(&self, i: i64) -> usize {
        i.rem_euclid(self.ranks.len() as i64) as usize
    }

    #[inline]
    pub fn at(&self, i: i64) -> u32 {
        self.ranks[self.index(i)]
    }

    /// Circular distance `|i - j|_p`.
    pub fn distance(&self, i: i64, j: i64) -> usize {
        let p = self.ranks.len();
        let d = (i - j).rem_euclid(p as i64) as usize;
        d.min(p - d)
    }

    pub fn swap(&mut self, i: i64, j: i64) {
        let (a, b) = (self.index(i), self.index(j));
        self.ranks.swap(a, b);
    }

    /// Rotation placing rank 0 at position 0.
    pub fn rotate_to_min(&self) -> StampCircle {
        let z = self
            .ranks
            .iter()
            .position(|&r| r == 0)
            .expect("rank 0 present");
        let mut ranks = self.ranks.clone();
        ranks.rotate_left(z);
        StampCircle { ranks }
    }

    /// Stamps at positions `1..p` (the linear form once rank 0 is at 0).
    pub fn linear_part(&self) -> Vec<u32> {
        self.ranks[1..].to_vec()
    }

    /// Circle with rank 0 at position 0 followed by the given stamps.
    pub fn from_linear(stamps: &[u32]) -> StampCircle {
        let mut ranks = alloc::vec![0];
        ranks.extend(rank_reduce(stamps));
        StampCircle { ranks }
    }
}

/// A window `σ(start, len)` of positions `start..start+len-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub start: i64,
    pub len: usize,
}

/// Linear form: stamps at `1..=m`, sentinel `-1` at `0` and `m + 1`.
#[derive(Debug, Clone)]
pub struct LinearStamps {
    ext: Vec<i64>,
}

impl LinearStamps {
    pub fn new(stamps: &[u32]) -> Self {
        let mut ext = Vec::with_capacity(stamps.len() + 2);
        ext.push(-1);
        ext.extend(stamps.iter().map(|&s| s as i64));
        ext.push(-1);
        LinearStamps { ext }
    }

    /// Number of stamped positions.
    pub fn len(&self) -> usize {
        self.ext.len() - 2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Rank at position `i`, `0 <= i <= m + 1`.
    #[inline]
    pub fn at(&self, i: i64) -> i64 {
        self.ext[i as usize]
    }
}

#[inline]
fn ind_i(u: impl Fn(i64) -> i64, i: i64, k: usize) -> bool {
    let (a, b) = (u(i - 1), u(i + k as i64));
    let hi = a.max(b);
    (i..i + k as i64).all(|j| u(j) > hi)
}

#[inline]
fn ind_j(u: impl Fn(i64) -> i64, i: i64, k_minus_1: usize) -> bool {
    let k = k_minus_1 as i64 + 1;
    let (a, b) = (u(i - 1), u(i + k - 1));
    a <= b && (i..i + k - 1).all(|j| u(j) > b)
}

/// Cyclic `I(i, k)`, `1 <= k <= p - 1`.
pub fn indicator_i(c: &StampCircle, i: i64, k: usize) -> bool {
    ind_i(|j| c.at(j) as i64, i, k)
}

/// Cyclic `J(i, k - 1)`, `1 <= k <= p`.
pub fn indicator_j(c: &StampCircle, i: i64, k_minus_1: usize) -> bool {
    ind_j(|j| c.at(j) as i64, i, k_minus_1)
}

/// Linear `I(i, k)` for `1 <= i`, `i + k - 1 <= m`.
pub fn linear_indicator_i(s: &LinearStamps, i: i64, k: usize) -> bool {
    ind_i(|j| s.at(j), i, k)
}

/// Linear `J(i, k - 1)` for `1 <= i`, `i + k - 1 <= m + 1`.
pub fn linear_indicator_j(s: &LinearStamps, i: i64, k_minus_1: usize) -> bool {
    ind_j(|j| s.at(j), i, k_minus_1)
}

/// Relative ranks (from 1) of positions `i..i+k-1`. Reading the pattern as
/// stamps of keys `1..=k` rebuilds the fringe tree; its inverse is the
/// insertion order.
pub fn window_pattern(c: &StampCircle, i: i64, k: usize) -> Vec<u32> {
    let vals: Vec<u32> = (i..i + k as i64).map(|j| c.at(j)).collect();
    rank_reduce(&vals)
}

fn pattern_of(u: &impl Fn(i64) -> i64, i: i64, k: usize) -> Vec<u32> {
    let vals: Vec<i64> = (i..i + k as i64).map(u).collect();
    rank_reduce(&vals)
}

fn eval_root(t: TreeRef<'_>, f: &dyn TollFunction) -> Value {
    let sizes = t.subtree_sizes();
    let root = t.root().expect("non-empty window tree");
    f.evaluate(&Fringe::new(t, root, &sizes))
}

fn check_mode(f: &dyn TollFunction, binary: bool) -> Result<()> {
    match (f.mode(), binary) {
        (None, _) | (Some(TreeMode::Binary), true) => Ok(()),
        (Some(TreeMode::Ordered | TreeMode::Unordered), false) => Ok(()),
        (Some(m), _) => Err(Error::ModeMismatch(alloc::format!(
            "{m} toll for a {} representation",
            if binary {
                "binary search tree"
            } else {
                "recursive tree"
            }
        ))),
    }
}

/// Σ over windows with `I = 1` of `f(tree of the window)`; `starts` are the
/// window starts and `kmax` the largest length considered.
fn sum_bst(
    u: impl Fn(i64) -> i64,
    starts: core::ops::RangeInclusive<i64>,
    kmax: usize,
    f: &dyn TollFunction,
) -> Value {
    let kmax = kmax.min(f.support_bound().unwrap_or(usize::MAX));
    let mut acc = Value::zero();
    for i in starts {
        let a = u(i - 1);
        let mut interior_min = i64::MAX;
        for k in 1..=kmax {
            interior_min = interior_min.min(u(i + k as i64 - 1));
            if interior_min < a {
                break;
            }
            let b = u(i + k as i64);
            if a.max(b) < interior_min {
                let tree = BinaryTree::from_stamps(&pattern_of(&u, i, k));
                acc.add_assign(&eval_root(TreeRef::from(&tree), f));
            }
        }
    }
    acc
}

/// Same for `J`: a window of `k - 1` stamps giving a recursive fringe tree
/// of size `k`.
fn sum_rrt(
    u: impl Fn(i64) -> i64,
    starts: core::ops::RangeInclusive<i64>,
    kmax: usize,
    f: &dyn TollFunction,
) -> Value {
    let kmax = kmax.min(f.support_bound().unwrap_or(usize::MAX));
    let mut acc = Value::zero();
    for i in starts {
        let a = u(i - 1);
        let mut interior_min = i64::MAX;
        for k in 1..=kmax {
            if k >= 2 {
                interior_min = interior_min.min(u(i + k as i64 - 2));
                if interior_min < a {
                    break;
                }
            }
            let b = u(i + k as i64 - 1);
            if a <= b && b < interior_min {
                let bin = BinaryTree::from_stamps(&pattern_of(&u, i, k - 1));
                let tree = rotation_to_ordered(&bin);
                acc.add_assign(&eval_root(TreeRef::from(&tree), f));
            }
        }
    }
    acc
}

/// `Σ_k Σ_i I(i,k) f(σ(i,k))` on the linear form of `stamps` (a tree of
/// `n = stamps.len()` nodes).
pub fn eval_linear_bst(stamps: &[u32], f: &dyn TollFunction) -> Result<Value> {
    check_mode(f, true)?;
    let s = LinearStamps::new(stamps);
    let n = s.len() as i64;
    // Windows must end by position n; the loop stops at the right sentinel.
    let u = |j: i64| s.at(j);
    let mut acc = Value::zero();
    for i in 1..=n {
        let part = sum_bst(u, i..=i, (n - i + 1) as usize, f);
        acc.add_assign(&part);
    }
    Ok(acc)
}

/// Cyclic form for a circle of period `p = n + 1`.
pub fn eval_cyclic_bst(c: &StampCircle, f: &dyn TollFunction) -> Result<Value> {
    check_mode(f, true)?;
    let p = c.period() as i64;
    Ok(sum_bst(|j| c.at(j) as i64, 1..=p, (p - 1) as usize, f))
}

/// `Σ_k Σ_i J(i,k-1) f̄(σ(i,k-1))` on the linear form of the `n - 1` stamps
/// of the rotated binary tree of a recursive tree with `n` nodes.
pub fn eval_linear_rrt(stamps: &[u32], f: &dyn TollFunction) -> Result<Value> {
    check_mode(f, false)?;
    let s = LinearStamps::new(stamps);
    let n = s.len() as i64 + 1;
    let u = |j: i64| s.at(j);
    let mut acc = Value::zero();
    for i in 1..=n {
        acc.add_assign(&sum_rrt(u, i..=i, (n - i + 1) as usize, f));
    }
    Ok(acc)
}

/// Cyclic form for a circle of period `p = n`.
pub fn eval_cyclic_rrt(c: &StampCircle, f: &dyn TollFunction) -> Result<Value> {
    check_mode(f, false)?;
    let p = c.period() as i64;
    Ok(sum_rrt(|j| c.at(j) as i64, 1..=p, p as usize, f))
}

/// Subtree size of every key of the binary search tree with the given
/// stamps (key `i + 1` at index `i`), from the nearest smaller stamps on
/// either side. O(n).
pub fn bst_subtree_sizes_from_stamps(stamps: &[u32], out: &mut Vec<u32>, stack: &mut Vec<u32>) {
    let n = stamps.len();
    out.clear();
    out.resize(n, 0);
    stack.clear();
    // left boundary: index of previous smaller stamp + 1 (stored in out)
    for i in 0..n {
        while let Some(&t) = stack.last() {
            if stamps[t as usize] > stamps[i] {
                stack.pop();
            } else {
                break;
            }
        }
        out[i] = stack.last().map_or(0, |&t| t + 1);
        stack.push(i as u32);
    }
    stack.clear();
    for i in (0..n).rev() {
        while let Some(&t) = stack.last() {
            if stamps[t as usize] > stamps[i] {
                stack.pop();
            } else {
                break;
            }
        }
        let right = stack.last().map_or(n as u32, |&t| t);
        out[i] = right - out[i];
        stack.push(i as u32);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::for_each_permutation;
    use crate::rational::rat;
    use crate::trees::{additive_functional, Toll, TreeKey};

    fn circle(r: &[u32]) -> StampCircle {
        StampCircle::new(r.to_vec()).unwrap()
    }

    #[test]
    fn indicator_examples() {
        let c = circle(&[0, 2, 1, 3]);
        assert!(!indicator_i(&c, 2, 1));
        // k = n with rank 0 at position 0
        assert!(indicator_i(&c, 1, 3));
        let s = LinearStamps::new(&[2, 1, 3]);
        assert!(linear_indicator_i(&s, 1, 3));
        // k = 1: J = 1 iff U_i >= U_{i-1}
        assert!(indicator_j(&c, 2, 0) == (c.at(2) >= c.at(1)));
        assert!(linear_indicator_j(&s, 1, 3));
        // n = 4 recursive-tree nodes, 3 stamps
        for k in 1..4usize {
            let i = 4 - k as i64 + 1;
            assert!(!linear_indicator_j(&s, i, k - 1));
        }
    }

    #[test]
    fn patterns() {
        let c = circle(&[3, 1, 2, 0]);
        assert_eq!(window_pattern(&c, 0, 3), alloc::vec![3, 1, 2]);
        assert_eq!(window_pattern(&c, 1, 1), alloc::vec![1]);
        assert_eq!(rank_reduce(&[10u32, 4, 7]), alloc::vec![3, 1, 2]);
    }

    #[test]
    fn overlapping_windows_never_both_fire() {
        for_each_permutation(7, |p| {
            let c = circle(p);
            for k in 1..6 {
                for i in 0..7i64 {
                    for d in 1..=k as i64 {
                        assert!(!(indicator_i(&c, i, k) && indicator_i(&c, i + d, k)));
                    }
                }
            }
        });
    }

    #[test]
    fn linear_form_equals_tree_functional() {
        let tolls: [Toll; 4] = [
            Toll::SizeIndicator(1),
            Toll::SizeIndicator(3),
            Toll::TreeMatch(TreeKey::parse(TreeMode::Binary, "((..)(..))").unwrap()),
            Toll::LeafProtectedCombo,
        ];
        for n in 0..=6 {
            for_each_permutation(n, |p| {
                let stamps: Vec<u32> = p.iter().map(|&x| x + 1).collect();
                let tree = BinaryTree::from_stamps(&stamps);
                let c = StampCircle::from_linear(&stamps);
                for f in &tolls {
                    let lin = eval_linear_bst(&stamps, f).unwrap();
                    assert_eq!(lin, additive_functional(TreeRef::from(&tree), f).unwrap());
                    assert_eq!(eval_cyclic_bst(&c, f).unwrap(), lin);
                }
            });
        }
    }

    #[test]
    fn cyclic_form_is_rotation_invariant() {
        let f = Toll::SizeIndicator(2);
        for_each_permutation(6, |p| {
            let c = circle(p);
            let lin = eval_linear_bst(&c.rotate_to_min().linear_part(), &f).unwrap();
            assert_eq!(eval_cyclic_bst(&c, &f).unwrap(), lin);
            let r = circle(&c.rotate_to_min().ranks()[..]);
            assert_eq!(
                eval_cyclic_rrt(&c, &f).unwrap(),
                eval_linear_rrt(&r.linear_part(), &f).unwrap()
            );
        });
    }

    #[test]
    fn rrt_linear_form_counts_leaves() {
        use crate::trees::{outdegree_counts, rotation_to_ordered};
        for n in 1..=7 {
            for_each_permutation(n - 1, |p| {
                let stamps: Vec<u32> = p.iter().map(|&x| x + 1).collect();
                let rrt = rotation_to_ordered(&BinaryTree::from_stamps(&stamps));
                let leaves = outdegree_counts(TreeRef::from(&rrt))
                    .get(&0)
                    .copied()
                    .unwrap_or(0);
                let v = eval_linear_rrt(&stamps, &Toll::SizeIndicator(1)).unwrap();
                assert_eq!(v, Value::from_int(leaves as i64));
                let g = Toll::RrtShapeOrdered;
                let a = eval_linear_rrt(&stamps, &g).unwrap().to_f64();
                let b = additive_functional(TreeRef::from(&rrt), &g)
                    .unwrap()
                    .to_f64();
                assert!((a - b).abs() < 1e-9);
            });
        }
    }

    #[test]
    fn indicator_expectations_and_independence() {
        // p = 7: E I = 2/((k+1)(k+2)), E J = 1/(k(k+1)); pattern independent of I.
        let p = 7usize;
        let total = 5040i64;
        for k in 1..p - 1 {
            let mut hits = 0i64;
            let mut by_pattern: alloc::collections::BTreeMap<Vec<u32>, (i64, i64)> =
                Default::default();
            let mut hits_j = 0i64;
            for_each_permutation(p, |r| {
                let c = circle(r);
                let i_on = indicator_i(&c, 1, k);
                hits += i_on as i64;
                hits_j += indicator_j(&c, 1, k - 1) as i64;
                let e = by_pattern.entry(window_pattern(&c, 1, k)).or_default();
                e.0 += 1;
                e.1 += i_on as i64;
            });
            assert_eq!(rat(hits, total), rat(2, ((k + 1) * (k + 2)) as i64));
            assert_eq!(rat(hits_j, total), rat(1, (k * (k + 1)) as i64));
            for (_, (cnt, on)) in by_pattern {
                // P(I=1, pattern) = P(I=1) P(pattern)
                assert_eq!(rat(on, total), rat(hits, total) * rat(cnt, total));
            }
        }
    }

    #[test]
    fn interval_sizes_match_tree() {
        let (mut out, mut st) = (Vec::new(), Vec::new());
        for_each_permutation(7, |p| {
            let tree = BinaryTree::from_stamps(p);
            bst_subtree_sizes_from_stamps(p, &mut out, &mut st);
            let sizes = tree.subtree_sizes();
            for i in 0..7 {
                assert_eq!(out[i] as usize, sizes[i]);
            }
        });
    }
}
