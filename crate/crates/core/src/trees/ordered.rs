use alloc::vec::Vec;

use crate::error::{invalid, Result};

use super::NodeId;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OrderedNode {
    pub children: Vec<NodeId>,
    pub label: Option<u32>,
}

/// Rooted ordered tree (always non-empty).
#[derive(Debug, Clone)]
pub struct OrderedTree {
    nodes: Vec<OrderedNode>,
    root: NodeId,
}

impl OrderedTree {
    pub fn single() -> Self {
        OrderedTree {
            nodes: alloc::vec![OrderedNode::default()],
            root: 0,
        }
    }

    /// Unlabelled tree whose root has the given principal subtrees, in order.
    pub fn from_children(children: &[&OrderedTree]) -> Self {
        let mut t = OrderedTree::single();
        for c in children {
            let id = t.graft(c, c.root);
            t.nodes[0].children.push(id);
        }
        t
    }

    pub fn from_nodes(nodes: Vec<OrderedNode>, root: NodeId) -> Result<Self> {
        let t = OrderedTree { nodes, root };
        t.validate()?;
        Ok(t)
    }

    fn graft(&mut self, src: &OrderedTree, v: NodeId) -> NodeId {
        let id = self.nodes.len();
        self.nodes.push(OrderedNode {
            children: Vec::with_capacity(src.nodes[v].children.len()),
            label: src.nodes[v].label,
        });
        for &c in &src.nodes[v].children {
            let cid = self.graft(src, c);
            self.nodes[id].children.push(cid);
        }
        id
    }

    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, v: NodeId) -> &OrderedNode {
        &self.nodes[v]
    }

    pub fn children(&self, v: NodeId) -> &[NodeId] {
        &self.nodes[v].children
    }

    pub fn label(&self, v: NodeId) -> Option<u32> {
        self.nodes[v].label
    }

    pub fn has_labels(&self) -> bool {
        self.nodes.iter().all(|n| n.label.is_some())
    }

    pub fn postorder(&self) -> Vec<NodeId> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = alloc::vec![(self.root, false)];
        while let Some((v, expanded)) = stack.pop() {
            if expanded {
                out.push(v);
                continue;
            }
            stack.push((v, true));
            for &c in self.nodes[v].children.iter().rev() {
                stack.push((c, false));
            }
        }
        out
    }

    pub fn subtree_sizes(&self) -> Vec<usize> {
        let mut sizes = alloc::vec![0usize; self.nodes.len()];
        for v in self.postorder() {
            sizes[v] = 1 + self.nodes[v]
                .children
                .iter()
                .map(|&c| sizes[c])
                .sum::<usize>();
        }
        sizes
    }

    pub fn fringe(&self, v: NodeId) -> Result<OrderedTree> {
        if v >= self.nodes.len() {
            return Err(invalid(alloc::format!("node {v} not in tree")));
        }
        let mut t = OrderedTree {
            nodes: Vec::new(),
            root: 0,
        };
        t.graft(self, v);
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.nodes.len();
        if self.root >= n {
            return Err(invalid("root out of range"));
        }
        let mut parents = alloc::vec![0u32; n];
        for node in &self.nodes {
            for &c in &node.children {
                if c >= n {
                    return Err(invalid("child index out of range"));
                }
                parents[c] += 1;
                if parents[c] > 1 {
                    return Err(invalid("node with two parents"));
                }
            }
        }
        if parents[self.root] != 0 {
            return Err(invalid("root has a parent"));
        }
        if self.postorder().len() != n {
            return Err(invalid("nodes unreachable from root"));
        }
        if self.nodes.iter().any(|x| x.label.is_some()) {
            if !self.has_labels() {
                return Err(invalid("labels present on some nodes only"));
            }
            for node in &self.nodes {
                let mut prev = node.label;
                for &c in &node.children {
                    if self.nodes[c].label <= prev {
                        return Err(invalid("labels not increasing"));
                    }
                    prev = self.nodes[c].label;
                }
            }
        }
        Ok(())
    }

    /// Ordered shape equality, ignoring labels.
    pub fn same_shape(&self, other: &OrderedTree) -> bool {
        fn go(a: &OrderedTree, x: NodeId, b: &OrderedTree, y: NodeId) -> bool {
            let (cx, cy) = (&a.nodes[x].children, &b.nodes[y].children);
            cx.len() == cy.len() && cx.iter().zip(cy).all(|(&p, &q)| go(a, p, b, q))
        }
        self.size() == other.size() && go(self, self.root, other, other.root)
    }

    /// Reinitializes as the recursive tree with node `i + 2` attached to
    /// `parents[i]` (1-based). No range checks.
    pub(crate) fn rebuild_from_attachments_unchecked(&mut self, parents: &[u32]) {
        let n = parents.len() + 1;
        self.nodes.truncate(n);
        for node in &mut self.nodes {
            node.children.clear();
        }
        while self.nodes.len() < n {
            self.nodes.push(OrderedNode::default());
        }
        for (i, node) in self.nodes.iter_mut().enumerate() {
            node.label = Some(i as u32 + 1);
        }
        for (i, &p) in parents.iter().enumerate() {
            self.nodes[p as usize - 1].children.push(i + 1);
        }
        self.root = 0;
    }
}

/// Labelled equality: same ordered shape and labels.
impl PartialEq for OrderedTree {
    fn eq(&self, other: &Self) -> bool {
        fn go(a: &OrderedTree, x: NodeId, b: &OrderedTree, y: NodeId) -> bool {
            let (p, q) = (&a.nodes[x], &b.nodes[y]);
            p.label == q.label
                && p.children.len() == q.children.len()
                && p.children
                    .iter()
                    .zip(&q.children)
                    .all(|(&u, &w)| go(a, u, b, w))
        }
        self.size() == other.size() && go(self, self.root, other, other.root)
    }
}

impl Eq for OrderedTree {}

/// Recursive tree on `1..=n`: node `i + 2` is attached to `parents[i]`,
/// which must lie in `1..=i + 1`. Children are kept in label order.
pub fn rrt_from_attachments(parents: &[usize]) -> Result<OrderedTree> {
    for (i, &p) in parents.iter().enumerate() {
        if p < 1 || p > i + 1 {
            return Err(invalid(alloc::format!(
                "parent {p} of node {} outside 1..={}",
                i + 2,
                i + 1
            )));
        }
    }
    let ps: Vec<u32> = parents.iter().map(|&p| p as u32).collect();
    let mut t = OrderedTree::single();
    t.rebuild_from_attachments_unchecked(&ps);
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn attachment_examples() {
        let one = rrt_from_attachments(&[]).unwrap();
        assert_eq!(one.size(), 1);
        let star = rrt_from_attachments(&[1, 1]).unwrap();
        assert_eq!(star.children(star.root()), &[1, 2]);
        let path = rrt_from_attachments(&[1, 2]).unwrap();
        assert_eq!(path.children(0), &[1]);
        assert_eq!(path.children(1), &[2]);
        assert!(path.validate().is_ok());
        assert!(rrt_from_attachments(&[2]).is_err());
        assert!(rrt_from_attachments(&[0]).is_err());
    }

    #[test]
    fn sizes_and_fringe() {
        let t = rrt_from_attachments(&[1, 1, 2, 2, 3]).unwrap();
        let s = t.subtree_sizes();
        assert_eq!(s[0], 6);
        assert_eq!(s[1], 3);
        let f = t.fringe(1).unwrap();
        assert_eq!(f.size(), 3);
        assert_eq!(f.label(f.root()), Some(2));
    }
}
