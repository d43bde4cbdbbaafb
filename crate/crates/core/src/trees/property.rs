use alloc::string::String;
use core::fmt;
use core::str::FromStr;

use crate::error::{invalid, Error, Result};

use super::{Fringe, TreeKey, TreeMode, TreeRef};

/// A set of trees, decided on a fringe. Binary trees and ordered trees read
/// the shape-based variants in their own kind.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Property {
    /// Every tree.
    Any,
    /// Three nodes, root with two leaf children.
    Cherry,
    /// Binary: no node has a left child. Ordered: every node has at most
    /// one child.
    RightPath,
    /// Equal to the key under the key's mode.
    Tree(TreeKey),
    /// Root has exactly `d` children.
    RootDegree(usize),
    /// Root's nearest leaf descendant is at distance at least `l`.
    RootProtected(usize),
}

impl Property {
    pub fn holds(&self, f: &Fringe<'_>) -> Result<bool> {
        Ok(match self {
            Property::Any => true,
            Property::Cherry => f.size() == 3 && f.degree() == 2,
            Property::RightPath => right_path(f),
            Property::Tree(key) => f.size() == key.size() && f.key(key.mode())? == *key,
            Property::RootDegree(d) => f.degree() == *d,
            Property::RootProtected(l) => f.min_leaf_distance() >= *l,
        })
    }

    /// The tree-kind restriction implied by the property, if any.
    pub fn mode(&self) -> Option<TreeMode> {
        match self {
            Property::Tree(k) => Some(k.mode()),
            _ => None,
        }
    }
}

fn right_path(f: &Fringe<'_>) -> bool {
    let t = f.tree();
    let mut cur = Some(f.node());
    while let Some(v) = cur {
        match t {
            TreeRef::Binary(b) => {
                if b.left(v).is_some() {
                    return false;
                }
                cur = b.right(v);
            }
            TreeRef::Ordered(o) => {
                let ch = o.children(v);
                if ch.len() > 1 {
                    return false;
                }
                cur = ch.first().copied();
            }
        }
    }
    true
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Property::Any => f.write_str("any"),
            Property::Cherry => f.write_str("cherry"),
            Property::RightPath => f.write_str("right-path"),
            Property::Tree(k) => write!(f, "tree:{}:{}", k.mode(), k),
            Property::RootDegree(d) => write!(f, "root-degree({d})"),
            Property::RootProtected(l) => write!(f, "protected-root({l})"),
        }
    }
}

/// Parses `name(arg)` into `(name, Some(arg))`.
pub(crate) fn split_call(s: &str) -> (&str, Option<&str>) {
    match (s.find('('), s.ends_with(')')) {
        (Some(i), true) => (&s[..i], Some(&s[i + 1..s.len() - 1])),
        _ => (s, None),
    }
}

pub(crate) fn parse_usize(arg: Option<&str>, what: &str) -> Result<usize> {
    arg.and_then(|a| a.trim().parse().ok())
        .ok_or_else(|| invalid(alloc::format!("{what} needs an integer argument")))
}

impl FromStr for Property {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("tree:") {
            let (mode, text) = rest
                .split_once(':')
                .ok_or_else(|| invalid("expected tree:<mode>:<key>"))?;
            return Ok(Property::Tree(TreeKey::parse(mode.parse()?, text)?));
        }
        let (name, arg) = split_call(s);
        match name {
            "any" => Ok(Property::Any),
            "cherry" => Ok(Property::Cherry),
            "right-path" | "path" => Ok(Property::RightPath),
            "root-degree" => Ok(Property::RootDegree(parse_usize(arg, name)?)),
            "protected-root" => Ok(Property::RootProtected(parse_usize(arg, name)?)),
            _ => Err(invalid(alloc::format!("unknown property `{s}`"))),
        }
    }
}

impl Property {
    pub fn to_name(&self) -> String {
        alloc::format!("{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::{bst_from_permutation, rrt_from_attachments};

    #[test]
    fn cherry_and_paths() {
        let c = bst_from_permutation(&[2, 1, 3]).unwrap();
        let s = c.subtree_sizes();
        let f = Fringe::new(TreeRef::from(&c), c.root().unwrap(), &s);
        assert!(Property::Cherry.holds(&f).unwrap());
        assert!(!Property::RightPath.holds(&f).unwrap());
        let p = bst_from_permutation(&[1, 2, 3]).unwrap();
        let s = p.subtree_sizes();
        let f = Fringe::new(TreeRef::from(&p), p.root().unwrap(), &s);
        assert!(Property::RightPath.holds(&f).unwrap());
        let star = rrt_from_attachments(&[1, 1]).unwrap();
        let s = star.subtree_sizes();
        let f = Fringe::new(TreeRef::from(&star), 0, &s);
        assert!(Property::Cherry.holds(&f).unwrap());
        assert!(Property::RootDegree(2).holds(&f).unwrap());
    }

    #[test]
    fn parse_round_trip() {
        for s in [
            "any",
            "cherry",
            "right-path",
            "root-degree(2)",
            "protected-root(3)",
            "tree:binary:((..)(..))",
        ] {
            let p: Property = s.parse().unwrap();
            assert_eq!(p.to_name(), s);
        }
        assert!("nope".parse::<Property>().is_err());
    }
}
