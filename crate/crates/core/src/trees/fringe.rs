use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::rational::Value;

use super::{BinaryTree, NodeId, OrderedTree, Property, TollFunction, TreeKey, TreeMode};

/// Borrowed view over either tree kind.
#[derive(Debug, Clone, Copy)]
pub enum TreeRef<'a> {
    Binary(&'a BinaryTree),
    Ordered(&'a OrderedTree),
}

/// Owned tree of either kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnyTree {
    Binary(BinaryTree),
    Ordered(OrderedTree),
}

impl AnyTree {
    pub fn as_ref(&self) -> TreeRef<'_> {
        match self {
            AnyTree::Binary(b) => TreeRef::Binary(b),
            AnyTree::Ordered(o) => TreeRef::Ordered(o),
        }
    }
}

impl<'a> From<&'a BinaryTree> for TreeRef<'a> {
    fn from(t: &'a BinaryTree) -> Self {
        TreeRef::Binary(t)
    }
}

impl<'a> From<&'a OrderedTree> for TreeRef<'a> {
    fn from(t: &'a OrderedTree) -> Self {
        TreeRef::Ordered(t)
    }
}

impl<'a> TreeRef<'a> {
    pub fn size(self) -> usize {
        match self {
            TreeRef::Binary(b) => b.size(),
            TreeRef::Ordered(o) => o.size(),
        }
    }

    pub fn root(self) -> Option<NodeId> {
        match self {
            TreeRef::Binary(b) => b.root(),
            TreeRef::Ordered(o) => Some(o.root()),
        }
    }

    pub fn is_binary(self) -> bool {
        matches!(self, TreeRef::Binary(_))
    }

    pub fn degree(self, v: NodeId) -> usize {
        match self {
            TreeRef::Binary(b) => b.left(v).is_some() as usize + b.right(v).is_some() as usize,
            TreeRef::Ordered(o) => o.children(v).len(),
        }
    }

    /// Present children in order (left before right for binary trees).
    pub fn children(self, v: NodeId) -> Vec<NodeId> {
        match self {
            TreeRef::Binary(b) => b.left(v).into_iter().chain(b.right(v)).collect(),
            TreeRef::Ordered(o) => o.children(v).to_vec(),
        }
    }

    pub fn for_each_child(self, v: NodeId, mut f: impl FnMut(NodeId)) {
        match self {
            TreeRef::Binary(b) => {
                if let Some(c) = b.left(v) {
                    f(c)
                }
                if let Some(c) = b.right(v) {
                    f(c)
                }
            }
            TreeRef::Ordered(o) => o.children(v).iter().for_each(|&c| f(c)),
        }
    }

    pub fn postorder(self) -> Vec<NodeId> {
        match self {
            TreeRef::Binary(b) => b.postorder(),
            TreeRef::Ordered(o) => o.postorder(),
        }
    }

    pub fn subtree_sizes(self) -> Vec<usize> {
        match self {
            TreeRef::Binary(b) => b.subtree_sizes(),
            TreeRef::Ordered(o) => o.subtree_sizes(),
        }
    }

    pub fn supports(self, mode: TreeMode) -> bool {
        matches!(
            (self, mode),
            (TreeRef::Binary(_), TreeMode::Binary)
                | (TreeRef::Ordered(_), TreeMode::Ordered | TreeMode::Unordered)
        )
    }

    pub fn fringe(self, v: NodeId) -> Result<AnyTree> {
        Ok(match self {
            TreeRef::Binary(b) => AnyTree::Binary(b.fringe(v)?),
            TreeRef::Ordered(o) => AnyTree::Ordered(o.fringe(v)?),
        })
    }
}

/// The fringe subtree at `node`, evaluated in place.
#[derive(Debug, Clone, Copy)]
pub struct Fringe<'a> {
    tree: TreeRef<'a>,
    node: NodeId,
    sizes: &'a [usize],
}

impl<'a> Fringe<'a> {
    /// `sizes` must be the subtree sizes of `tree`.
    pub fn new(tree: TreeRef<'a>, node: NodeId, sizes: &'a [usize]) -> Self {
        debug_assert_eq!(sizes.len(), tree.size());
        Fringe { tree, node, sizes }
    }

    pub fn tree(&self) -> TreeRef<'a> {
        self.tree
    }

    pub fn node(&self) -> NodeId {
        self.node
    }

    pub fn size(&self) -> usize {
        self.sizes[self.node]
    }

    pub fn degree(&self) -> usize {
        self.tree.degree(self.node)
    }

    pub fn is_leaf(&self) -> bool {
        self.size() == 1
    }

    /// Sizes of the left and right subtrees (binary trees only, else `None`).
    pub fn binary_parts(&self) -> Option<(usize, usize)> {
        match self.tree {
            TreeRef::Binary(b) => Some((
                b.left(self.node).map_or(0, |c| self.sizes[c]),
                b.right(self.node).map_or(0, |c| self.sizes[c]),
            )),
            TreeRef::Ordered(_) => None,
        }
    }

    /// Sizes of the principal subtrees, in child order.
    pub fn child_sizes(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.tree
            .for_each_child(self.node, |c| out.push(self.sizes[c]));
        out
    }

    pub fn key(&self, mode: TreeMode) -> Result<TreeKey> {
        fringe_key(self.tree, self.node, mode)
    }

    /// Distance from the root of this fringe to its nearest leaf.
    pub fn min_leaf_distance(&self) -> usize {
        let mut frontier = alloc::vec![self.node];
        let mut d = 0;
        loop {
            let mut next = Vec::new();
            for &v in &frontier {
                if self.tree.degree(v) == 0 {
                    return d;
                }
                self.tree.for_each_child(v, |c| next.push(c));
            }
            frontier = next;
            d += 1;
        }
    }
}

pub fn fringe_key(t: TreeRef<'_>, v: NodeId, mode: TreeMode) -> Result<TreeKey> {
    if v >= t.size() {
        return Err(Error::InvalidInput(alloc::format!("node {v} not in tree")));
    }
    match (t, mode) {
        (TreeRef::Binary(b), TreeMode::Binary) => Ok(TreeKey::of_binary(b, Some(v))),
        (TreeRef::Ordered(o), TreeMode::Ordered | TreeMode::Unordered) => {
            TreeKey::of_ordered(o, v, mode)
        }
        _ => Err(Error::ModeMismatch(alloc::format!(
            "{mode} key of the wrong tree kind"
        ))),
    }
}

/// Fringe size → number of nodes with that subtree size.
pub fn fringe_size_multiset(t: TreeRef<'_>) -> BTreeMap<usize, usize> {
    let mut m = BTreeMap::new();
    for s in t.subtree_sizes() {
        *m.entry(s).or_insert(0) += 1;
    }
    m
}

pub fn count_by_size(t: TreeRef<'_>, k: usize) -> usize {
    t.subtree_sizes().into_iter().filter(|&s| s == k).count()
}

/// Number of fringe subtrees equal to `key` under its mode.
pub fn count_matching(t: TreeRef<'_>, key: &TreeKey) -> Result<usize> {
    if !t.supports(key.mode()) {
        return Err(Error::ModeMismatch(alloc::format!(
            "{} key on the wrong tree kind",
            key.mode()
        )));
    }
    let k = key.size();
    let sizes = t.subtree_sizes();
    let mut c = 0;
    for (v, &s) in sizes.iter().enumerate() {
        if s == k && fringe_key(t, v, key.mode())? == *key {
            c += 1;
        }
    }
    Ok(c)
}

/// Number of fringe subtrees of size `k` satisfying `pred`.
pub fn count_property(t: TreeRef<'_>, k: usize, pred: &Property) -> Result<usize> {
    let sizes = t.subtree_sizes();
    let mut c = 0;
    for (v, &s) in sizes.iter().enumerate() {
        if s == k && pred.holds(&Fringe::new(t, v, &sizes))? {
            c += 1;
        }
    }
    Ok(c)
}

/// Outdegree → number of nodes.
pub fn outdegree_counts(t: TreeRef<'_>) -> BTreeMap<usize, usize> {
    let mut m = BTreeMap::new();
    for v in 0..t.size() {
        *m.entry(t.degree(v)).or_insert(0) += 1;
    }
    m
}

/// Distance from every node to its nearest leaf descendant.
pub fn min_leaf_distances(t: TreeRef<'_>) -> Vec<usize> {
    let mut d = alloc::vec![0usize; t.size()];
    for v in t.postorder() {
        let mut best = usize::MAX;
        t.for_each_child(v, |c| best = best.min(d[c] + 1));
        d[v] = if best == usize::MAX { 0 } else { best };
    }
    d
}

/// Number of nodes whose nearest leaf descendant is at distance `>= l`.
pub fn protected_count(t: TreeRef<'_>, l: usize) -> usize {
    min_leaf_distances(t)
        .into_iter()
        .filter(|&d| d >= l)
        .count()
}

/// `F(T) = Σ_v f(T(v))`. Nodes above the toll's support bound are skipped.
pub fn additive_functional(t: TreeRef<'_>, f: &dyn TollFunction) -> Result<Value> {
    if let Some(mode) = f.mode() {
        if !t.supports(mode) {
            return Err(Error::ModeMismatch(alloc::format!(
                "{mode} toll on the wrong tree kind"
            )));
        }
    }
    let sizes = t.subtree_sizes();
    let bound = f.support_bound().unwrap_or(usize::MAX);
    let mut acc = Value::zero();
    for (v, &s) in sizes.iter().enumerate() {
        if s <= bound {
            acc.add_assign(&f.evaluate(&Fringe::new(t, v, &sizes)));
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::trees::{bst_from_permutation, rrt_from_attachments, Toll};

    fn key(s: &str) -> TreeKey {
        TreeKey::parse(TreeMode::Binary, s).unwrap()
    }

    #[test]
    fn counting_examples() {
        let cherry = bst_from_permutation(&[2, 1, 3]).unwrap();
        let t = TreeRef::from(&cherry);
        assert_eq!(count_by_size(t, 3), 1);
        assert_eq!(count_matching(t, &key("(..)")).unwrap(), 2);
        let ms = fringe_size_multiset(t);
        assert_eq!(ms.get(&1), Some(&2));
        assert_eq!(ms.get(&3), Some(&1));

        let path = bst_from_permutation(&[1, 2, 3, 4, 5]).unwrap();
        assert_eq!(count_by_size(TreeRef::from(&path), 3), 1);
        assert_eq!(count_by_size(TreeRef::from(&path), 6), 0);
    }

    #[test]
    fn protected_examples() {
        let single = bst_from_permutation(&[1]).unwrap();
        assert_eq!(protected_count(TreeRef::from(&single), 2), 0);
        let full = bst_from_permutation(&[4, 2, 6, 1, 3, 5, 7]).unwrap();
        assert_eq!(protected_count(TreeRef::from(&full), 2), 1);
        assert_eq!(protected_count(TreeRef::from(&full), 1), 3);
    }

    #[test]
    fn additive_examples() {
        let cherry = bst_from_permutation(&[2, 1, 3]).unwrap();
        let leaves = Toll::SizeIndicator(1);
        assert_eq!(
            additive_functional(TreeRef::from(&cherry), &leaves).unwrap(),
            Value::Exact(rat(2, 1))
        );
        let path = bst_from_permutation(&[1, 2, 3]).unwrap();
        let v = additive_functional(TreeRef::from(&path), &Toll::LogSize).unwrap();
        assert!((v.to_f64() - libm::log(6.0)).abs() < 1e-12);
        let rrt = rrt_from_attachments(&[1, 1]).unwrap();
        assert!(additive_functional(TreeRef::from(&rrt), &Toll::LeafProtectedCombo).is_err());
    }

    #[test]
    fn outdegrees_sum_to_size() {
        let t = bst_from_permutation(&[3, 1, 2, 5, 4]).unwrap();
        let d = outdegree_counts(TreeRef::from(&t));
        assert_eq!(d.values().sum::<usize>(), 5);
        let d0 = d.get(&0).copied().unwrap_or(0);
        let d1 = d.get(&1).copied().unwrap_or(0);
        let d2 = d.get(&2).copied().unwrap_or(0);
        assert_eq!(d1 + 2 * d2, 4);
        assert_eq!(d2 + 1, d0);
    }
}
