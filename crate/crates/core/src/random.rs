//! Random trees from a [`Stream`], with scratch buffers reusable across
//! replicates.

use alloc::vec::Vec;

use crate::rng::Stream;
use crate::trees::{BinaryTree, OrderedTree};

/// Fills `out` with a uniform permutation of `1..=n` (Fisher–Yates).
pub fn random_stamps(rng: &mut Stream, n: usize, out: &mut Vec<u32>) {
    out.clear();
    out.extend(1..=n as u32);
    for i in (1..n).rev() {
        let j = rng.below(i as u64 + 1) as usize;
        out.swap(i, j);
    }
}

/// Parent labels for nodes `2..=n`: entry `i` is uniform on `1..=i + 1`.
pub fn random_attachments(rng: &mut Stream, n: usize, out: &mut Vec<u32>) {
    out.clear();
    for i in 0..n.saturating_sub(1) {
        out.push(rng.below(i as u64 + 1) as u32 + 1);
    }
}

/// Uniform random binary search tree with `n` nodes.
pub fn random_bst(rng: &mut Stream, n: usize) -> BinaryTree {
    let mut stamps = Vec::new();
    random_stamps(rng, n, &mut stamps);
    BinaryTree::from_stamps(&stamps)
}

/// Uniform random recursive tree with `n ≥ 1` nodes.
pub fn random_rrt(rng: &mut Stream, n: usize) -> OrderedTree {
    let mut parents = Vec::new();
    random_attachments(rng, n.max(1), &mut parents);
    let mut t = OrderedTree::single();
    t.rebuild_from_attachments_unchecked(&parents);
    t
}

/// Subtree sizes (indexed by label − 1) and outdegrees of the recursive
/// tree with the given parents. Children have larger labels than parents,
/// so one reverse sweep accumulates sizes.
pub fn rrt_sizes_and_degrees(parents: &[u32], sizes: &mut Vec<u32>, degrees: &mut Vec<u32>) {
    let n = parents.len() + 1;
    sizes.clear();
    sizes.resize(n, 1);
    degrees.clear();
    degrees.resize(n, 0);
    for v in (1..n).rev() {
        let p = parents[v - 1] as usize - 1;
        sizes[p] += sizes[v];
        degrees[p] += 1;
    }
}
