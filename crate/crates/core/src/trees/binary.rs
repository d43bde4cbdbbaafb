use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::perm::is_permutation_from;

use super::NodeId;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BinaryNode {
    pub left: Option<NodeId>,
    pub right: Option<NodeId>,
    pub key: Option<u32>,
    pub stamp: Option<u32>,
}

/// Rooted binary tree in an index pool. `root == None` is the empty tree.
#[derive(Debug, Clone, Default)]
pub struct BinaryTree {
    nodes: Vec<BinaryNode>,
    root: Option<NodeId>,
}

impl BinaryTree {
    pub fn empty() -> Self {
        BinaryTree::default()
    }

    pub fn leaf() -> Self {
        BinaryTree {
            nodes: alloc::vec![BinaryNode::default()],
            root: Some(0),
        }
    }

    /// Unlabelled tree with the given subtrees of a new root.
    pub fn join(left: &BinaryTree, right: &BinaryTree) -> Self {
        let mut t = BinaryTree {
            nodes: Vec::with_capacity(left.size() + right.size() + 1),
            root: Some(0),
        };
        t.nodes.push(BinaryNode::default());
        let l = left.root.map(|r| t.graft(left, r));
        let r = right.root.map(|r| t.graft(right, r));
        t.nodes[0].left = l;
        t.nodes[0].right = r;
        t
    }

    /// Builds from a raw pool; validates the single-rooted-tree invariant.
    pub fn from_nodes(nodes: Vec<BinaryNode>, root: Option<NodeId>) -> Result<Self> {
        let t = BinaryTree { nodes, root };
        t.validate()?;
        Ok(t)
    }

    fn graft(&mut self, src: &BinaryTree, v: NodeId) -> NodeId {
        let id = self.nodes.len();
        let node = src.nodes[v];
        self.nodes.push(BinaryNode {
            left: None,
            right: None,
            key: node.key,
            stamp: node.stamp,
        });
        if let Some(l) = node.left {
            let c = self.graft(src, l);
            self.nodes[id].left = Some(c);
        }
        if let Some(r) = node.right {
            let c = self.graft(src, r);
            self.nodes[id].right = Some(c);
        }
        id
    }

    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.root.is_none()
    }

    pub fn root(&self) -> Option<NodeId> {
        self.root
    }

    pub fn node(&self, v: NodeId) -> &BinaryNode {
        &self.nodes[v]
    }

    pub fn nodes(&self) -> &[BinaryNode] {
        &self.nodes
    }

    pub fn left(&self, v: NodeId) -> Option<NodeId> {
        self.nodes[v].left
    }

    pub fn right(&self, v: NodeId) -> Option<NodeId> {
        self.nodes[v].right
    }

    pub fn has_keys(&self) -> bool {
        !self.nodes.is_empty() && self.nodes.iter().all(|n| n.key.is_some())
    }

    pub fn has_stamps(&self) -> bool {
        !self.nodes.is_empty() && self.nodes.iter().all(|n| n.stamp.is_some())
    }

    /// Nodes in post-order (children before parents).
    pub fn postorder(&self) -> Vec<NodeId> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let Some(r) = self.root else { return out };
        let mut stack = alloc::vec![(r, false)];
        while let Some((v, expanded)) = stack.pop() {
            if expanded {
                out.push(v);
                continue;
            }
            stack.push((v, true));
            if let Some(c) = self.nodes[v].right {
                stack.push((c, false));
            }
            if let Some(c) = self.nodes[v].left {
                stack.push((c, false));
            }
        }
        out
    }

    /// In-order node sequence.
    pub fn inorder(&self) -> Vec<NodeId> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = Vec::new();
        let mut cur = self.root;
        while cur.is_some() || !stack.is_empty() {
            while let Some(v) = cur {
                stack.push(v);
                cur = self.nodes[v].left;
            }
            let v = stack.pop().expect("non-empty");
            out.push(v);
            cur = self.nodes[v].right;
        }
        out
    }

    /// Subtree size of every node, indexed by node id.
    pub fn subtree_sizes(&self) -> Vec<usize> {
        let mut sizes = alloc::vec![0usize; self.nodes.len()];
        for v in self.postorder() {
            let n = &self.nodes[v];
            sizes[v] = 1 + n.left.map_or(0, |c| sizes[c]) + n.right.map_or(0, |c| sizes[c]);
        }
        sizes
    }

    /// Detached copy of the fringe subtree rooted at `v`.
    pub fn fringe(&self, v: NodeId) -> Result<BinaryTree> {
        if v >= self.nodes.len() {
            return Err(invalid(alloc::format!("node {v} not in tree")));
        }
        let mut t = BinaryTree {
            nodes: Vec::new(),
            root: Some(0),
        };
        t.graft(self, v);
        Ok(t)
    }

    /// Checks the structural, key and stamp invariants.
    pub fn validate(&self) -> Result<()> {
        let n = self.nodes.len();
        let Some(r) = self.root else {
            return if n == 0 {
                Ok(())
            } else {
                Err(invalid("empty root with live nodes"))
            };
        };
        if r >= n {
            return Err(invalid("root out of range"));
        }
        let mut parent_count = alloc::vec![0u8; n];
        for node in &self.nodes {
            for c in [node.left, node.right].into_iter().flatten() {
                if c >= n {
                    return Err(invalid("child index out of range"));
                }
                parent_count[c] += 1;
                if parent_count[c] > 1 {
                    return Err(invalid("node with two parents"));
                }
            }
        }
        if parent_count[r] != 0 {
            return Err(invalid("root has a parent"));
        }
        // Reachability rules out cycles detached from the root.
        if self.postorder().len() != n {
            return Err(invalid("nodes unreachable from root"));
        }
        if self.nodes.iter().any(|x| x.key.is_some()) {
            if !self.has_keys() {
                return Err(invalid("keys present on some nodes only"));
            }
            let keys: Vec<u32> = self
                .inorder()
                .iter()
                .map(|&v| self.nodes[v].key.unwrap())
                .collect();
            if keys.windows(2).any(|w| w[0] >= w[1]) {
                return Err(invalid("in-order keys not increasing"));
            }
        }
        if self.nodes.iter().any(|x| x.stamp.is_some()) {
            if !self.has_stamps() {
                return Err(invalid("stamps present on some nodes only"));
            }
            for node in &self.nodes {
                for c in [node.left, node.right].into_iter().flatten() {
                    if self.nodes[c].stamp <= node.stamp {
                        return Err(invalid("child stamp not above parent stamp"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Same shape, ignoring keys and stamps.
    pub fn same_shape(&self, other: &BinaryTree) -> bool {
        fn go(a: &BinaryTree, x: Option<NodeId>, b: &BinaryTree, y: Option<NodeId>) -> bool {
            match (x, y) {
                (None, None) => true,
                (Some(x), Some(y)) => {
                    go(a, a.nodes[x].left, b, b.nodes[y].left)
                        && go(a, a.nodes[x].right, b, b.nodes[y].right)
                }
                _ => false,
            }
        }
        self.size() == other.size() && go(self, self.root, other, other.root)
    }

    /// Cartesian tree on positions `1..=n` with the given distinct stamps:
    /// the binary search tree obtained by inserting keys in increasing
    /// stamp order. O(n).
    pub fn from_stamps(stamps: &[u32]) -> BinaryTree {
        let mut t = BinaryTree::empty();
        t.rebuild_from_stamps(stamps);
        t
    }

    /// In-place variant of [`BinaryTree::from_stamps`] reusing the pool.
    /// Node `i` carries key `i + 1` and stamp `stamps[i]`.
    pub fn rebuild_from_stamps(&mut self, stamps: &[u32]) {
        self.nodes.clear();
        self.nodes
            .extend(stamps.iter().enumerate().map(|(i, &s)| BinaryNode {
                left: None,
                right: None,
                key: Some(i as u32 + 1),
                stamp: Some(s),
            }));
        let mut stack: Vec<NodeId> = Vec::new();
        for i in 0..stamps.len() {
            let mut last: Option<NodeId> = None;
            while let Some(&top) = stack.last() {
                if stamps[top] > stamps[i] {
                    last = stack.pop();
                } else {
                    break;
                }
            }
            self.nodes[i].left = last;
            if let Some(&top) = stack.last() {
                self.nodes[top].right = Some(i);
            }
            stack.push(i);
        }
        self.root = stack.first().copied();
    }
}

/// Labelled equality: same shape, keys and stamps.
impl PartialEq for BinaryTree {
    fn eq(&self, other: &Self) -> bool {
        fn go(a: &BinaryTree, x: Option<NodeId>, b: &BinaryTree, y: Option<NodeId>) -> bool {
            match (x, y) {
                (None, None) => true,
                (Some(x), Some(y)) => {
                    let (p, q) = (&a.nodes[x], &b.nodes[y]);
                    p.key == q.key
                        && p.stamp == q.stamp
                        && go(a, p.left, b, q.left)
                        && go(a, p.right, b, q.right)
                }
                _ => false,
            }
        }
        self.size() == other.size() && go(self, self.root, other, other.root)
    }
}

impl Eq for BinaryTree {}

/// Binary search tree from sequential insertion of `perm` (a permutation of
/// `1..=n`). The key inserted at step `t` (1-based) receives stamp `t`.
pub fn bst_from_permutation(perm: &[usize]) -> Result<BinaryTree> {
    if !is_permutation_from(perm, 1) {
        return Err(invalid("expected a permutation of 1..n"));
    }
    let mut t = BinaryTree {
        nodes: Vec::with_capacity(perm.len()),
        root: None,
    };
    for (step, &key) in perm.iter().enumerate() {
        let id = t.nodes.len();
        t.nodes.push(BinaryNode {
            left: None,
            right: None,
            key: Some(key as u32),
            stamp: Some(step as u32 + 1),
        });
        let Some(mut cur) = t.root else {
            t.root = Some(id);
            continue;
        };
        loop {
            let ck = t.nodes[cur].key.expect("keyed");
            let slot = if (key as u32) < ck {
                &mut t.nodes[cur].left
            } else {
                &mut t.nodes[cur].right
            };
            match *slot {
                Some(next) => cur = next,
                None => {
                    *slot = Some(id);
                    break;
                }
            }
        }
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::{for_each_permutation, inverse_one_based};

    #[test]
    fn insertion_examples() {
        assert!(bst_from_permutation(&[]).unwrap().is_empty());
        let path = bst_from_permutation(&[1, 2, 3]).unwrap();
        let r = path.root().unwrap();
        assert!(path.left(r).is_none());
        let c = path.right(r).unwrap();
        assert!(path.left(c).is_none() && path.right(c).is_some());

        let cherry = bst_from_permutation(&[2, 1, 3]).unwrap();
        let r = cherry.root().unwrap();
        assert_eq!(cherry.node(r).key, Some(2));
        assert_eq!(cherry.node(cherry.left(r).unwrap()).key, Some(1));
        assert_eq!(cherry.node(cherry.right(r).unwrap()).key, Some(3));
        assert!(cherry.validate().is_ok());
    }

    #[test]
    fn rejects_non_permutations() {
        assert!(bst_from_permutation(&[1, 1]).is_err());
        assert!(bst_from_permutation(&[0, 1]).is_err());
        assert!(bst_from_permutation(&[1, 3]).is_err());
    }

    #[test]
    fn cartesian_matches_insertion() {
        for n in 0..=7 {
            for_each_permutation(n, |p| {
                let perm: Vec<usize> = p.iter().map(|&x| x as usize + 1).collect();
                let ins = bst_from_permutation(&perm).unwrap();
                let stamps: Vec<u32> = inverse_one_based(&perm).iter().map(|&s| s as u32).collect();
                let cart = BinaryTree::from_stamps(&stamps);
                assert_eq!(ins, cart);
                assert!(cart.validate().is_ok());
            });
        }
    }

    #[test]
    fn validate_catches_bad_pools() {
        let n = BinaryNode::default();
        let cyc = alloc::vec![
            BinaryNode { left: Some(1), ..n },
            BinaryNode { left: Some(0), ..n }
        ];
        assert!(BinaryTree::from_nodes(cyc, Some(0)).is_err());
        let orphan = alloc::vec![n, n];
        assert!(BinaryTree::from_nodes(orphan, Some(0)).is_err());
        let bad_stamp = alloc::vec![
            BinaryNode {
                left: Some(1),
                stamp: Some(2),
                ..n
            },
            BinaryNode {
                stamp: Some(1),
                ..n
            }
        ];
        assert!(BinaryTree::from_nodes(bad_stamp, Some(0)).is_err());
    }

    #[test]
    fn fringe_copy_and_sizes() {
        let t = bst_from_permutation(&[4, 2, 6, 1, 3, 5, 7]).unwrap();
        let sizes = t.subtree_sizes();
        assert_eq!(sizes[t.root().unwrap()], 7);
        let l = t.left(t.root().unwrap()).unwrap();
        let f = t.fringe(l).unwrap();
        assert_eq!(f.size(), 3);
        assert!(f.validate().is_ok());
        assert!(t.fringe(99).is_err());
    }
}
