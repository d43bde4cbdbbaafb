//! Rotation correspondence between ordered trees on `n` nodes and binary
//! trees on `n - 1` nodes: eldest child becomes the left child, next
//! sibling becomes the right child, and the root is dropped.

use alloc::vec::Vec;

use super::{BinaryNode, BinaryTree, NodeId, OrderedNode, OrderedTree};
use crate::perm::rank_reduce;

/// Labels become stamps (ranks among the non-root labels, from 1) and, when
/// labels exist, keys are the in-order positions.
pub fn rotation_to_binary(t: &OrderedTree) -> BinaryTree {
    let n = t.size();
    let root = t.root();
    // Ordered node ids other than the root, in a fixed order.
    let others: Vec<NodeId> = (0..n).filter(|&v| v != root).collect();
    let mut index = alloc::vec![usize::MAX; n];
    for (b, &v) in others.iter().enumerate() {
        index[v] = b;
    }
    let mut nodes = alloc::vec![BinaryNode::default(); others.len()];
    for v in 0..n {
        let ch = t.children(v);
        if v != root {
            nodes[index[v]].left = ch.first().map(|&c| index[c]);
        }
        for w in ch.windows(2) {
            nodes[index[w[0]]].right = Some(index[w[1]]);
        }
    }
    let broot = t.children(root).first().map(|&c| index[c]);
    if t.has_labels() && !others.is_empty() {
        let labels: Vec<u32> = others.iter().map(|&v| t.label(v).unwrap()).collect();
        for (b, r) in rank_reduce(&labels).into_iter().enumerate() {
            nodes[b].stamp = Some(r);
        }
    }
    let mut out = BinaryTree::from_nodes(nodes, broot).expect("rotation yields a tree");
    if out.has_stamps() {
        out = with_inorder_keys(&out);
    }
    out
}

fn with_inorder_keys(t: &BinaryTree) -> BinaryTree {
    let mut nodes: Vec<BinaryNode> = t.nodes().to_vec();
    for (i, v) in t.inorder().into_iter().enumerate() {
        nodes[v].key = Some(i as u32 + 1);
    }
    BinaryTree::from_nodes(nodes, t.root()).expect("relabelled tree")
}

/// Inverse of [`rotation_to_binary`]. Stamps become labels `2..=n` in stamp
/// order and the new root is labelled 1.
pub fn rotation_to_ordered(b: &BinaryTree) -> OrderedTree {
    let m = b.size();
    // Ordered node 0 is the root, binary node v maps to v + 1.
    let mut nodes = alloc::vec![OrderedNode::default(); m + 1];
    let chain = |start: Option<NodeId>| {
        let mut out = Vec::new();
        let mut cur = start;
        while let Some(x) = cur {
            out.push(x + 1);
            cur = b.right(x);
        }
        out
    };
    nodes[0].children = chain(b.root());
    for v in 0..m {
        nodes[v + 1].children = chain(b.left(v));
    }
    if b.has_stamps() || m == 0 {
        let stamps: Vec<u32> = b.nodes().iter().map(|x| x.stamp.unwrap()).collect();
        nodes[0].label = Some(1);
        for (v, r) in rank_reduce(&stamps).into_iter().enumerate() {
            nodes[v + 1].label = Some(r + 1);
        }
    }
    OrderedTree::from_nodes(nodes, 0).expect("rotation yields a tree")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::{rrt_from_attachments, TreeKey};

    #[test]
    fn small_examples() {
        let single = OrderedTree::single();
        assert!(rotation_to_binary(&single).is_empty());

        let star = rrt_from_attachments(&[1, 1]).unwrap();
        let b = rotation_to_binary(&star);
        assert_eq!(TreeKey::of_binary_tree(&b).to_text(), "(.(..))");

        let path = rrt_from_attachments(&[1, 2]).unwrap();
        let b = rotation_to_binary(&path);
        assert_eq!(TreeKey::of_binary_tree(&b).to_text(), "((..).)");
        let r = b.root().unwrap();
        assert_eq!(b.node(r).stamp, Some(1));
        assert_eq!(b.node(b.left(r).unwrap()).stamp, Some(2));
    }

    #[test]
    fn round_trip_all_small_recursive_trees() {
        for n in 1..=7usize {
            let mut parents = alloc::vec![1usize; n.saturating_sub(1)];
            loop {
                let t = rrt_from_attachments(&parents).unwrap();
                let b = rotation_to_binary(&t);
                assert_eq!(b.size(), n - 1);
                assert!(b.validate().is_ok());
                assert_eq!(rotation_to_ordered(&b), t);
                // advance mixed-radix counter
                let mut i = parents.len();
                let mut done = true;
                while i > 0 {
                    i -= 1;
                    if parents[i] < i + 1 {
                        parents[i] += 1;
                        done = false;
                        break;
                    }
                    parents[i] = 1;
                }
                if done {
                    break;
                }
            }
        }
    }
}
