//! All tree shapes of a given size.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use super::{rotation_to_ordered, AnyTree, BinaryTree, OrderedTree, TreeKey, TreeMode};

/// All binary trees with `k` nodes (Catalan many), unlabelled.
pub fn all_binary_trees(k: usize) -> Vec<BinaryTree> {
    let mut table: Vec<Vec<BinaryTree>> = alloc::vec![alloc::vec![BinaryTree::empty()]];
    for n in 1..=k {
        let mut row = Vec::new();
        for l in 0..n {
            for a in &table[l] {
                for b in &table[n - 1 - l] {
                    row.push(BinaryTree::join(a, b));
                }
            }
        }
        table.push(row);
    }
    table.swap_remove(k)
}

/// All ordered trees with `k ≥ 1` nodes, unlabelled.
pub fn all_ordered_trees(k: usize) -> Vec<OrderedTree> {
    if k == 0 {
        return Vec::new();
    }
    all_binary_trees(k - 1)
        .iter()
        .map(|b| strip_labels(rotation_to_ordered(b)))
        .collect()
}

fn strip_labels(t: OrderedTree) -> OrderedTree {
    let key = TreeKey::of_ordered_tree(&t, TreeMode::Ordered).expect("ordered");
    key.to_ordered().expect("round trip")
}

/// Canonical keys of all unordered rooted trees with `k ≥ 1` nodes.
pub fn all_unordered_keys(k: usize) -> Vec<TreeKey> {
    let set: BTreeSet<TreeKey> = all_ordered_trees(k)
        .iter()
        .map(|t| TreeKey::of_ordered_tree(t, TreeMode::Unordered).expect("ordered"))
        .collect();
    set.into_iter().collect()
}

/// Representatives of every equivalence class of size `k` under `mode`.
pub fn all_trees(mode: TreeMode, k: usize) -> Vec<AnyTree> {
    match mode {
        TreeMode::Binary => all_binary_trees(k)
            .into_iter()
            .map(AnyTree::Binary)
            .collect(),
        TreeMode::Ordered => all_ordered_trees(k)
            .into_iter()
            .map(AnyTree::Ordered)
            .collect(),
        TreeMode::Unordered => all_unordered_keys(k)
            .into_iter()
            .map(|key| AnyTree::Ordered(key.to_ordered().expect("canonical key")))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalan_and_rooted_counts() {
        let catalan = [1, 1, 2, 5, 14, 42, 132, 429];
        for (k, &c) in catalan.iter().enumerate() {
            assert_eq!(all_binary_trees(k).len(), c);
        }
        for k in 1..=7 {
            assert_eq!(all_ordered_trees(k).len(), catalan[k - 1]);
        }
        // unlabelled rooted trees (OEIS A000081)
        let rooted = [1, 1, 2, 4, 9, 20, 48];
        for (i, &c) in rooted.iter().enumerate() {
            assert_eq!(all_unordered_keys(i + 1).len(), c);
        }
    }

    #[test]
    fn binary_keys_distinct() {
        let keys: BTreeSet<TreeKey> = all_binary_trees(6)
            .iter()
            .map(TreeKey::of_binary_tree)
            .collect();
        assert_eq!(keys.len(), 132);
    }
}
