//! Canonical tree encodings.
//!
//! * Binary: one byte per node in preorder, bit 1 = left child present,
//!   bit 0 = right child present. The empty tree has the empty code.
//! * Ordered: balanced parentheses, children in order.
//! * Unordered: balanced parentheses with child encodings sorted
//!   lexicographically (`(` < `)`), which is canonical for isomorphism.
//!
//! Text forms: binary `(<left><right>)` with `.` for an absent child (the
//! empty tree is `.`); ordered and unordered use the parenthesis code.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{invalid, Error, Result};

use super::{BinaryNode, BinaryTree, NodeId, OrderedNode, OrderedTree};

/// Comparison mode. The derived order (Binary < Ordered < Unordered) is the
/// serialization order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TreeMode {
    Binary,
    Ordered,
    Unordered,
}

impl TreeMode {
    pub fn name(self) -> &'static str {
        match self {
            TreeMode::Binary => "binary",
            TreeMode::Ordered => "ordered",
            TreeMode::Unordered => "unordered",
        }
    }
}

impl fmt::Display for TreeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TreeMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "binary" => Ok(TreeMode::Binary),
            "ordered" => Ok(TreeMode::Ordered),
            "unordered" => Ok(TreeMode::Unordered),
            o => Err(invalid(alloc::format!("unknown tree mode `{o}`"))),
        }
    }
}

const LEFT: u8 = 0b10;
const RIGHT: u8 = 0b01;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TreeKey {
    mode: TreeMode,
    code: Vec<u8>,
}

impl TreeKey {
    pub fn mode(&self) -> TreeMode {
        self.mode
    }

    pub fn code(&self) -> &[u8] {
        &self.code
    }

    /// Builds a key from raw parts, checking well-formedness.
    pub fn from_code(mode: TreeMode, code: Vec<u8>) -> Result<Self> {
        let key = TreeKey { mode, code };
        match mode {
            TreeMode::Binary => {
                key.to_binary()?;
            }
            TreeMode::Ordered => {
                key.to_ordered()?;
            }
            TreeMode::Unordered => {
                let t = key.to_ordered()?;
                if TreeKey::of_ordered(&t, t.root(), TreeMode::Unordered)? != key {
                    return Err(invalid("unordered code is not canonical"));
                }
            }
        }
        Ok(key)
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self.mode {
            TreeMode::Binary => self.code.len(),
            _ => self.code.len() / 2,
        }
    }

    /// Key of the fringe subtree at `v` (`None` = empty tree).
    pub fn of_binary(t: &BinaryTree, v: Option<NodeId>) -> TreeKey {
        let mut code = Vec::new();
        let mut stack: Vec<NodeId> = v.into_iter().collect();
        while let Some(x) = stack.pop() {
            let n = t.node(x);
            let mut b = 0;
            if n.left.is_some() {
                b |= LEFT;
            }
            if n.right.is_some() {
                b |= RIGHT;
            }
            code.push(b);
            if let Some(r) = n.right {
                stack.push(r);
            }
            if let Some(l) = n.left {
                stack.push(l);
            }
        }
        TreeKey {
            mode: TreeMode::Binary,
            code,
        }
    }

    pub fn of_binary_tree(t: &BinaryTree) -> TreeKey {
        TreeKey::of_binary(t, t.root())
    }

    /// Key of the fringe subtree at `v` under `Ordered` or `Unordered` mode.
    pub fn of_ordered(t: &OrderedTree, v: NodeId, mode: TreeMode) -> Result<TreeKey> {
        match mode {
            TreeMode::Binary => Err(Error::ModeMismatch("binary key of an ordered tree".into())),
            TreeMode::Ordered => {
                let mut code = Vec::new();
                ordered_code(t, v, &mut code);
                Ok(TreeKey { mode, code })
            }
            TreeMode::Unordered => Ok(TreeKey {
                mode,
                code: unordered_code(t, v),
            }),
        }
    }

    pub fn of_ordered_tree(t: &OrderedTree, mode: TreeMode) -> Result<TreeKey> {
        TreeKey::of_ordered(t, t.root(), mode)
    }

    pub fn to_text(&self) -> String {
        match self.mode {
            TreeMode::Binary => {
                if self.code.is_empty() {
                    return String::from(".");
                }
                let mut s = String::new();
                let mut pos = 0;
                binary_text(&self.code, &mut pos, &mut s);
                s
            }
            _ => self.code.iter().map(|&b| b as char).collect(),
        }
    }

    pub fn parse(mode: TreeMode, text: &str) -> Result<TreeKey> {
        let text: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        match mode {
            TreeMode::Binary => {
                let bytes = text.as_bytes();
                let mut pos = 0;
                let mut code = Vec::new();
                parse_binary(bytes, &mut pos, &mut code)?;
                if pos != bytes.len() {
                    return Err(invalid("trailing characters in binary key"));
                }
                Ok(TreeKey { mode, code })
            }
            TreeMode::Ordered | TreeMode::Unordered => {
                let t = TreeKey {
                    mode: TreeMode::Ordered,
                    code: text.into_bytes(),
                }
                .to_ordered()?;
                TreeKey::of_ordered(&t, t.root(), mode)
            }
        }
    }

    /// Representative binary tree (unlabelled).
    pub fn to_binary(&self) -> Result<BinaryTree> {
        if self.mode != TreeMode::Binary {
            return Err(Error::ModeMismatch("not a binary key".into()));
        }
        if self.code.is_empty() {
            return Ok(BinaryTree::empty());
        }
        let mut nodes: Vec<BinaryNode> = Vec::with_capacity(self.code.len());
        let mut pos = 0;
        build_binary(&self.code, &mut pos, &mut nodes)?;
        if pos != self.code.len() {
            return Err(invalid("trailing bytes in binary code"));
        }
        BinaryTree::from_nodes(nodes, Some(0))
    }

    /// Representative ordered tree (unlabelled).
    pub fn to_ordered(&self) -> Result<OrderedTree> {
        if self.mode == TreeMode::Binary {
            return Err(Error::ModeMismatch(
                "binary key has no ordered representative".into(),
            ));
        }
        let mut nodes: Vec<OrderedNode> = Vec::new();
        let mut stack: Vec<NodeId> = Vec::new();
        let mut closed_root = false;
        for &b in &self.code {
            if closed_root {
                return Err(invalid("trailing characters after the root"));
            }
            match b {
                b'(' => {
                    let id = nodes.len();
                    nodes.push(OrderedNode::default());
                    if let Some(&p) = stack.last() {
                        nodes[p].children.push(id);
                    }
                    stack.push(id);
                }
                b')' => {
                    stack.pop().ok_or_else(|| invalid("unbalanced `)`"))?;
                    if stack.is_empty() {
                        closed_root = true;
                    }
                }
                _ => return Err(invalid("ordered keys use only `(` and `)`")),
            }
        }
        if !closed_root {
            return Err(invalid("unbalanced or empty ordered key"));
        }
        OrderedTree::from_nodes(nodes, 0)
    }
}

impl fmt::Display for TreeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn ordered_code(t: &OrderedTree, v: NodeId, out: &mut Vec<u8>) {
    out.push(b'(');
    for &c in t.children(v) {
        ordered_code(t, c, out);
    }
    out.push(b')');
}

fn unordered_code(t: &OrderedTree, v: NodeId) -> Vec<u8> {
    let mut parts: Vec<Vec<u8>> = t
        .children(v)
        .iter()
        .map(|&c| unordered_code(t, c))
        .collect();
    parts.sort();
    let mut out = Vec::with_capacity(2 + parts.iter().map(Vec::len).sum::<usize>());
    out.push(b'(');
    for p in parts {
        out.extend_from_slice(&p);
    }
    out.push(b')');
    out
}

fn binary_text(code: &[u8], pos: &mut usize, out: &mut String) {
    let b = code[*pos];
    *pos += 1;
    out.push('(');
    if b & LEFT != 0 {
        binary_text(code, pos, out);
    } else {
        out.push('.');
    }
    if b & RIGHT != 0 {
        binary_text(code, pos, out);
    } else {
        out.push('.');
    }
    out.push(')');
}

fn parse_binary(s: &[u8], pos: &mut usize, code: &mut Vec<u8>) -> Result<bool> {
    match s.get(*pos) {
        Some(b'.') => {
            *pos += 1;
            Ok(false)
        }
        Some(b'(') => {
            *pos += 1;
            let slot = code.len();
            code.push(0);
            if parse_binary(s, pos, code)? {
                code[slot] |= LEFT;
            }
            if parse_binary(s, pos, code)? {
                code[slot] |= RIGHT;
            }
            if s.get(*pos) != Some(&b')') {
                return Err(invalid("expected `)` in binary key"));
            }
            *pos += 1;
            Ok(true)
        }
        _ => Err(invalid("expected `(` or `.` in binary key")),
    }
}

fn build_binary(code: &[u8], pos: &mut usize, nodes: &mut Vec<BinaryNode>) -> Result<NodeId> {
    let b = *code
        .get(*pos)
        .ok_or_else(|| invalid("truncated binary code"))?;
    if b & !(LEFT | RIGHT) != 0 {
        return Err(invalid("invalid binary code byte"));
    }
    *pos += 1;
    let id = nodes.len();
    nodes.push(BinaryNode::default());
    if b & LEFT != 0 {
        let c = build_binary(code, pos, nodes)?;
        nodes[id].left = Some(c);
    }
    if b & RIGHT != 0 {
        let c = build_binary(code, pos, nodes)?;
        nodes[id].right = Some(c);
    }
    Ok(id)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::{bst_from_permutation, rrt_from_attachments};

    #[test]
    fn binary_text_round_trip() {
        let cherry = bst_from_permutation(&[2, 1, 3]).unwrap();
        let k = TreeKey::of_binary_tree(&cherry);
        assert_eq!(k.to_text(), "((..)(..))");
        assert_eq!(TreeKey::parse(TreeMode::Binary, "((..)(..))").unwrap(), k);
        assert_eq!(k.size(), 3);
        assert!(k.to_binary().unwrap().same_shape(&cherry));
        let empty = TreeKey::parse(TreeMode::Binary, ".").unwrap();
        assert_eq!(empty.size(), 0);
        assert_eq!(empty.to_text(), ".");
        assert!(TreeKey::parse(TreeMode::Binary, "((..)").is_err());
        assert!(TreeKey::parse(TreeMode::Binary, "(..)x").is_err());
    }

    #[test]
    fn ordered_and_unordered() {
        let a = rrt_from_attachments(&[1, 1, 2]).unwrap(); // root: [2 -> [4], 3]
        let b = rrt_from_attachments(&[1, 1, 3]).unwrap(); // root: [2, 3 -> [4]]
        let ka = TreeKey::of_ordered_tree(&a, TreeMode::Ordered).unwrap();
        let kb = TreeKey::of_ordered_tree(&b, TreeMode::Ordered).unwrap();
        assert_ne!(ka, kb);
        assert_eq!(ka.to_text(), "((())())");
        let ua = TreeKey::of_ordered_tree(&a, TreeMode::Unordered).unwrap();
        let ub = TreeKey::of_ordered_tree(&b, TreeMode::Unordered).unwrap();
        assert_eq!(ua, ub);
        assert_eq!(TreeKey::parse(TreeMode::Unordered, "(()(()))").unwrap(), ua);
        assert!(TreeKey::from_code(TreeMode::Unordered, b"(()(()))".to_vec()).is_err());
        assert!(TreeKey::parse(TreeMode::Ordered, "()()").is_err());
        assert!(TreeKey::parse(TreeMode::Ordered, "").is_err());
    }
}
