//! Toll functions and the builtin catalog.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::rational::{int, Value};

use super::property::{parse_usize, split_call};
use super::{Fringe, Property, TreeKey, TreeMode, TreeRef};

/// A toll `f` evaluated on fringe subtrees.
///
/// Implementations must depend only on the equivalence class of the fringe
/// under [`TollFunction::mode`] (`None`: only on the fringe's shape in its
/// own kind) and must return zero above a declared support bound.
pub trait TollFunction: Sync {
    fn mode(&self) -> Option<TreeMode>;

    fn support_bound(&self) -> Option<usize> {
        None
    }

    fn evaluate(&self, f: &Fringe<'_>) -> Value;

    /// `f(n, |left|, |right|)` when the toll only depends on these sizes.
    fn binary_parts(&self, _n: usize, _left: usize, _right: usize) -> Option<Value> {
        None
    }

    /// `f(n, principal subtree sizes)` for recursive trees when the toll only
    /// depends on these (the outdegree is `sizes.len()`).
    fn recursive_parts(&self, _n: usize, _sizes: &[usize]) -> Option<Value> {
        None
    }
}

/// Builtin tolls.
#[derive(Debug, Clone, PartialEq)]
pub enum Toll {
    /// `1{|T| = k}`.
    SizeIndicator(usize),
    /// `1{T = key}`.
    TreeMatch(TreeKey),
    /// `1{|T| = k, T ∈ P}`.
    Property { property: Property, k: usize },
    /// `log |T|` (binary shape functional term).
    LogSize,
    /// `log |Λ| + log s(Λ)`, where `s` is the product of factorials of the
    /// multiplicities of isomorphic principal subtrees.
    RrtShapeUnordered,
    /// `Σ_i log(Σ_{j ≥ i} |Λ_j|)` over the principal subtrees `Λ_1..Λ_d`.
    RrtShapeOrdered,
    /// `1{root is l-protected}`.
    ProtectedRoot(usize),
    /// `1{root outdegree = d}`.
    RootDegree(usize),
    /// `1 − 2·1{T = leaf} + 1{T = cherry}` (binary).
    LeafProtectedCombo,
    /// Constant toll.
    Constant(i64),
}

impl Toll {
    /// Names accepted by [`Toll::from_str`], with argument placeholders.
    pub fn catalog() -> Vec<(&'static str, &'static str)> {
        alloc::vec![
            ("size-indicator(k)", "1 if the fringe has k nodes"),
            (
                "tree-match(key)",
                "1 if the fringe equals key; key is `mode:text` or binary text"
            ),
            (
                "property(pred,k)",
                "1 if the fringe has k nodes and satisfies pred"
            ),
            ("log-size", "log |T|"),
            (
                "rrt-shape-unordered",
                "log |T| + log s(T), unordered shape term"
            ),
            (
                "rrt-shape-ordered",
                "sum_i log(sum_{j>=i} |T_j|), ordered shape term"
            ),
            ("protected-root(l)", "1 if the root is l-protected"),
            ("root-degree(d)", "1 if the root has d children"),
            ("leaf-protected-combo", "1 - 2*1{leaf} + 1{cherry} (binary)"),
            ("constant(c)", "c"),
        ]
    }
}

fn ind(b: bool) -> Value {
    Value::Exact(int(b as i64))
}

fn ln(x: usize) -> f64 {
    libm::log(x as f64)
}

impl TollFunction for Toll {
    fn mode(&self) -> Option<TreeMode> {
        match self {
            Toll::TreeMatch(k) => Some(k.mode()),
            Toll::Property { property, .. } => property.mode(),
            Toll::RrtShapeUnordered => Some(TreeMode::Unordered),
            Toll::RrtShapeOrdered => Some(TreeMode::Ordered),
            Toll::LeafProtectedCombo => Some(TreeMode::Binary),
            _ => None,
        }
    }

    fn support_bound(&self) -> Option<usize> {
        match self {
            Toll::SizeIndicator(k) => Some(*k),
            Toll::TreeMatch(key) => Some(key.size()),
            Toll::Property { k, .. } => Some(*k),
            _ => None,
        }
    }

    fn evaluate(&self, f: &Fringe<'_>) -> Value {
        match self {
            Toll::SizeIndicator(k) => ind(f.size() == *k),
            Toll::TreeMatch(key) => {
                ind(f.size() == key.size() && f.key(key.mode()).ok().as_ref() == Some(key))
            }
            Toll::Property { property, k } => {
                ind(f.size() == *k && property.holds(f).unwrap_or(false))
            }
            Toll::LogSize => Value::Real(ln(f.size())),
            Toll::RrtShapeUnordered => Value::Real(ln(f.size()) + log_sym(f)),
            Toll::RrtShapeOrdered => Value::Real(ordered_shape_term(&f.child_sizes())),
            Toll::ProtectedRoot(l) => ind(f.min_leaf_distance() >= *l),
            Toll::RootDegree(d) => ind(f.degree() == *d),
            Toll::LeafProtectedCombo => {
                let v = 1 - 2 * (f.size() == 1) as i64 + (f.size() == 3 && f.degree() == 2) as i64;
                Value::from_int(v)
            }
            Toll::Constant(c) => Value::from_int(*c),
        }
    }

    fn binary_parts(&self, n: usize, l: usize, r: usize) -> Option<Value> {
        Some(match self {
            Toll::SizeIndicator(k) => ind(n == *k),
            Toll::LogSize => Value::Real(ln(n)),
            Toll::RootDegree(d) => ind((l > 0) as usize + (r > 0) as usize == *d),
            Toll::LeafProtectedCombo => {
                Value::from_int(1 - 2 * (n == 1) as i64 + (n == 3 && l == 1 && r == 1) as i64)
            }
            Toll::Constant(c) => Value::from_int(*c),
            Toll::ProtectedRoot(1) => ind(n > 1),
            _ => return None,
        })
    }

    fn recursive_parts(&self, n: usize, sizes: &[usize]) -> Option<Value> {
        Some(match self {
            Toll::SizeIndicator(k) => ind(n == *k),
            Toll::LogSize => Value::Real(ln(n)),
            Toll::RootDegree(d) => ind(sizes.len() == *d),
            Toll::RrtShapeOrdered => Value::Real(ordered_shape_term(sizes)),
            Toll::Constant(c) => Value::from_int(*c),
            Toll::ProtectedRoot(1) => ind(n > 1),
            Toll::ProtectedRoot(2) => ind(n > 1 && sizes.iter().all(|&s| s > 1)),
            _ => return None,
        })
    }
}

pub(crate) fn ordered_shape_term(sizes: &[usize]) -> f64 {
    let mut acc = 0.0;
    let mut suffix = 0usize;
    for &s in sizes.iter().rev() {
        suffix += s;
        acc += ln(suffix);
    }
    acc
}

/// `log s(Λ)` at the fringe root: log of Π (multiplicity)! over isomorphism
/// classes of principal subtrees.
fn log_sym(f: &Fringe<'_>) -> f64 {
    let TreeRef::Ordered(o) = f.tree() else {
        return 0.0;
    };
    let mut keys: Vec<TreeKey> = o
        .children(f.node())
        .iter()
        .map(|&c| TreeKey::of_ordered(o, c, TreeMode::Unordered).expect("ordered tree"))
        .collect();
    keys.sort();
    let mut acc = 0.0;
    let mut run = 0usize;
    for i in 0..keys.len() {
        run = if i > 0 && keys[i] == keys[i - 1] {
            run + 1
        } else {
            1
        };
        acc += ln(run);
    }
    acc
}

impl fmt::Display for Toll {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Toll::SizeIndicator(k) => write!(f, "size-indicator({k})"),
            Toll::TreeMatch(key) => match key.mode() {
                TreeMode::Binary => write!(f, "tree-match({key})"),
                m => write!(f, "tree-match({m}:{key})"),
            },
            Toll::Property { property, k } => write!(f, "property({property},{k})"),
            Toll::LogSize => f.write_str("log-size"),
            Toll::RrtShapeUnordered => f.write_str("rrt-shape-unordered"),
            Toll::RrtShapeOrdered => f.write_str("rrt-shape-ordered"),
            Toll::ProtectedRoot(l) => write!(f, "protected-root({l})"),
            Toll::RootDegree(d) => write!(f, "root-degree({d})"),
            Toll::LeafProtectedCombo => f.write_str("leaf-protected-combo"),
            Toll::Constant(c) => write!(f, "constant({c})"),
        }
    }
}

impl FromStr for Toll {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, arg) = split_call(s);
        match name {
            "leaves" => Ok(Toll::SizeIndicator(1)),
            "size-indicator" => Ok(Toll::SizeIndicator(parse_usize(arg, name)?)),
            "tree-match" => {
                let arg = arg.ok_or_else(|| invalid("tree-match needs a key"))?;
                let key = match arg.split_once(':') {
                    Some((mode, text)) => TreeKey::parse(mode.parse()?, text)?,
                    None => TreeKey::parse(TreeMode::Binary, arg)?,
                };
                Ok(Toll::TreeMatch(key))
            }
            "property" => {
                let arg = arg.ok_or_else(|| invalid("property needs (pred,k)"))?;
                let (p, k) = arg
                    .rsplit_once(',')
                    .ok_or_else(|| invalid("property needs (pred,k)"))?;
                Ok(Toll::Property {
                    property: p.parse()?,
                    k: parse_usize(Some(k), "property")?,
                })
            }
            "log-size" => Ok(Toll::LogSize),
            "rrt-shape-unordered" => Ok(Toll::RrtShapeUnordered),
            "rrt-shape-ordered" => Ok(Toll::RrtShapeOrdered),
            "protected-root" => Ok(Toll::ProtectedRoot(parse_usize(arg, name)?)),
            "root-degree" => Ok(Toll::RootDegree(parse_usize(arg, name)?)),
            "leaf-protected-combo" => Ok(Toll::LeafProtectedCombo),
            "constant" => {
                let c = arg
                    .and_then(|a| a.trim().parse().ok())
                    .ok_or_else(|| invalid("constant needs an integer"))?;
                Ok(Toll::Constant(c))
            }
            _ => Err(invalid(alloc::format!("unknown toll `{s}`"))),
        }
    }
}

impl Toll {
    pub fn to_name(&self) -> String {
        alloc::format!("{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for s in [
            "size-indicator(2)",
            "tree-match(((..)(..)))",
            "tree-match(ordered:(()()))",
            "property(cherry,3)",
            "log-size",
            "rrt-shape-unordered",
            "rrt-shape-ordered",
            "protected-root(2)",
            "root-degree(2)",
            "leaf-protected-combo",
            "constant(1)",
        ] {
            let t: Toll = s.parse().unwrap();
            assert_eq!(t.to_name(), s);
        }
        assert_eq!("leaves".parse::<Toll>().unwrap(), Toll::SizeIndicator(1));
        assert!("bogus".parse::<Toll>().is_err());
        assert!("size-indicator".parse::<Toll>().is_err());
    }

    #[test]
    fn ordered_term() {
        // children sizes (1,1): log 2 + log 1
        assert!((ordered_shape_term(&[1, 1]) - libm::log(2.0)).abs() < 1e-15);
    }
}
