//! Tree statistics shared by the exhaustive oracle and the sampler.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::devroye::bst_subtree_sizes_from_stamps;
use crate::error::{invalid, Error, Result};
use crate::model::Model;
use crate::random::{random_attachments, random_stamps, rrt_sizes_and_degrees};
use crate::rational::{int, to_f64, Value};
use crate::rng::Stream;
use crate::trees::property::{parse_usize, split_call};
use crate::trees::{
    fringe_key, BinaryTree, Fringe, OrderedTree, Property, Toll, TreeKey, TreeMode, TreeRef,
};

/// A statistic of a whole tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Stat {
    /// Number of fringe subtrees of size `k`.
    Count(usize),
    /// Number of fringe subtrees equal to the key under its mode.
    TreeCount(TreeKey),
    /// Number of fringe subtrees of size `k` with the property.
    PropertyCount { k: usize, property: Property },
    /// Number of nodes whose nearest leaf descendant is at distance `>= l`.
    Protected(usize),
    /// Number of nodes with exactly `d` children.
    Outdegree(usize),
    /// `Σ_v f(T(v))`.
    Additive(Toll),
}

impl Stat {
    /// Whether every value is an integer.
    pub fn is_integer(&self) -> bool {
        !matches!(self, Stat::Additive(_))
    }

    /// Whether the statistic is a function of subtree sizes and outdegrees
    /// only, so sampling can skip building the tree.
    fn size_only(&self, model: Model) -> bool {
        match self {
            Stat::Count(_) | Stat::Outdegree(_) => true,
            Stat::Additive(Toll::LogSize) => model == Model::Bst,
            _ => false,
        }
    }
}

impl fmt::Display for Stat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stat::Count(k) => write!(f, "count({k})"),
            Stat::TreeCount(key) => write!(f, "tree({}:{})", key.mode(), key.to_text()),
            Stat::PropertyCount { k, property } => write!(f, "property({property},{k})"),
            Stat::Protected(l) => write!(f, "protected({l})"),
            Stat::Outdegree(d) => write!(f, "outdegree({d})"),
            Stat::Additive(t) => write!(f, "additive({t})"),
        }
    }
}

impl FromStr for Stat {
    type Err = Error;

    /// `count(k)`, `tree(mode:key)`, `property(pred,k)`, `protected(l)`,
    /// `outdegree(d)`, `additive(toll)`; `leaves` is `count(1)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, arg) = split_call(s);
        match name {
            "leaves" => Ok(Stat::Count(1)),
            "count" => Ok(Stat::Count(parse_usize(arg, name)?)),
            "tree" => {
                let arg = arg.ok_or_else(|| invalid("tree needs a key"))?;
                let key = match arg.split_once(':') {
                    Some((mode, text)) => TreeKey::parse(mode.parse()?, text)?,
                    None => TreeKey::parse(TreeMode::Binary, arg)?,
                };
                Ok(Stat::TreeCount(key))
            }
            "property" => {
                let arg = arg.ok_or_else(|| invalid("property needs (pred,k)"))?;
                let (p, k) = arg
                    .rsplit_once(',')
                    .ok_or_else(|| invalid("property needs (pred,k)"))?;
                Ok(Stat::PropertyCount {
                    k: parse_usize(Some(k), name)?,
                    property: p.parse()?,
                })
            }
            "protected" => Ok(Stat::Protected(parse_usize(arg, name)?)),
            "outdegree" => Ok(Stat::Outdegree(parse_usize(arg, name)?)),
            "additive" => Ok(Stat::Additive(
                arg.ok_or_else(|| invalid("additive needs a toll"))?
                    .parse()?,
            )),
            other => Err(invalid(alloc::format!("unknown statistic `{other}`"))),
        }
    }
}

/// Evaluates several statistics on one tree, sharing subtree sizes and leaf
/// distances.
pub fn evaluate_stats(t: TreeRef<'_>, stats: &[Stat]) -> Result<Vec<Value>> {
    let sizes = t.subtree_sizes();
    let need_leaf = stats.iter().any(|s| matches!(s, Stat::Protected(_)));
    let leaf = if need_leaf {
        crate::trees::min_leaf_distances(t)
    } else {
        Vec::new()
    };
    stats
        .iter()
        .map(|s| evaluate_with(t, s, &sizes, &leaf))
        .collect()
}

pub fn evaluate_stat(t: TreeRef<'_>, stat: &Stat) -> Result<Value> {
    Ok(evaluate_stats(t, core::slice::from_ref(stat))?.remove(0))
}

fn evaluate_with(t: TreeRef<'_>, stat: &Stat, sizes: &[usize], leaf: &[usize]) -> Result<Value> {
    let count = |c: usize| Value::Exact(int(c as i64));
    Ok(match stat {
        Stat::Count(k) => count(sizes.iter().filter(|&&s| s == *k).count()),
        Stat::TreeCount(key) => {
            if !t.supports(key.mode()) {
                return Err(Error::ModeMismatch(alloc::format!(
                    "{} key on the wrong tree kind",
                    key.mode()
                )));
            }
            let mut c = 0;
            for (v, &s) in sizes.iter().enumerate() {
                if s == key.size() && fringe_key(t, v, key.mode())? == *key {
                    c += 1;
                }
            }
            count(c)
        }
        Stat::PropertyCount { k, property } => {
            let mut c = 0;
            for (v, &s) in sizes.iter().enumerate() {
                if s == *k && property.holds(&Fringe::new(t, v, sizes))? {
                    c += 1;
                }
            }
            count(c)
        }
        Stat::Protected(l) => count(leaf.iter().filter(|&&d| d >= *l).count()),
        Stat::Outdegree(d) => count((0..t.size()).filter(|&v| t.degree(v) == *d).count()),
        Stat::Additive(f) => crate::trees::additive_functional(t, f)?,
    })
}

/// Reusable buffers for drawing random trees and evaluating statistics.
#[derive(Debug, Default)]
pub struct TreeSampler {
    stamps: Vec<u32>,
    parents: Vec<u32>,
    sizes: Vec<u32>,
    degrees: Vec<u32>,
    stack: Vec<u32>,
    bst: Option<BinaryTree>,
    rrt: Option<OrderedTree>,
}

impl TreeSampler {
    pub fn new() -> Self {
        Self::default()
    }

    /// Draws one tree of size `n >= 1` and writes the statistics as reals.
    /// Size-only statistics are read off the stamps or parent labels
    /// without building the tree.
    pub fn sample(
        &mut self,
        model: Model,
        n: usize,
        stats: &[Stat],
        rng: &mut Stream,
        out: &mut Vec<f64>,
    ) -> Result<()> {
        if n == 0 {
            return Err(invalid("tree size must be at least 1"));
        }
        out.clear();
        if stats.iter().all(|s| s.size_only(model)) {
            match model {
                Model::Bst => {
                    random_stamps(rng, n, &mut self.stamps);
                    bst_subtree_sizes_from_stamps(&self.stamps, &mut self.sizes, &mut self.stack);
                    if stats.iter().any(|s| matches!(s, Stat::Outdegree(_))) {
                        bst_degrees(&self.stamps, &mut self.degrees);
                    }
                }
                Model::Rrt => {
                    random_attachments(rng, n, &mut self.parents);
                    rrt_sizes_and_degrees(&self.parents, &mut self.sizes, &mut self.degrees);
                }
            }
            for s in stats {
                let x = match s {
                    Stat::Count(k) => count_eq(&self.sizes, *k),
                    Stat::Outdegree(d) => count_eq(&self.degrees, *d),
                    Stat::Additive(Toll::LogSize) => {
                        self.sizes.iter().map(|&x| libm::log(x as f64)).sum()
                    }
                    _ => unreachable!("size-only statistics"),
                };
                out.push(x);
            }
            return Ok(());
        }
        let values = match model {
            Model::Bst => {
                random_stamps(rng, n, &mut self.stamps);
                let t = self.bst.get_or_insert_with(BinaryTree::empty);
                t.rebuild_from_stamps(&self.stamps);
                evaluate_stats(TreeRef::Binary(t), stats)?
            }
            Model::Rrt => {
                random_attachments(rng, n, &mut self.parents);
                let t = self.rrt.get_or_insert_with(OrderedTree::single);
                t.rebuild_from_attachments_unchecked(&self.parents);
                evaluate_stats(TreeRef::Ordered(t), stats)?
            }
        };
        out.extend(values.iter().map(value_f64));
        Ok(())
    }
}

fn count_eq(xs: &[u32], v: usize) -> f64 {
    xs.iter().filter(|&&x| x as usize == v).count() as f64
}

fn value_f64(v: &Value) -> f64 {
    match v {
        Value::Exact(r) => to_f64(r),
        Value::Real(x) => *x,
    }
}

/// Outdegrees of the binary search tree from its stamps: key `i` has a left
/// child iff key `i - 1` has a later stamp, and likewise on the right.
fn bst_degrees(stamps: &[u32], degrees: &mut Vec<u32>) {
    let n = stamps.len();
    degrees.clear();
    degrees.resize(n, 0);
    for i in 0..n {
        let left = i > 0 && stamps[i - 1] > stamps[i];
        let right = i + 1 < n && stamps[i + 1] > stamps[i];
        degrees[i] = left as u32 + right as u32;
    }
}

/// Names used in reports.
pub fn stat_names(stats: &[Stat]) -> Vec<String> {
    stats.iter().map(|s| alloc::format!("{s}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::rng::SeedSpec;
    use crate::trees::bst_from_permutation;

    #[test]
    fn parse_round_trip() {
        for s in [
            "count(2)",
            "tree(binary:((..)(..)))",
            "property(cherry,3)",
            "protected(2)",
            "outdegree(0)",
            "additive(leaf-protected-combo)",
        ] {
            let st: Stat = s.parse().unwrap();
            assert_eq!(alloc::format!("{st}").parse::<Stat>().unwrap(), st);
        }
        assert_eq!("leaves".parse::<Stat>().unwrap(), Stat::Count(1));
        assert!("bogus(1)".parse::<Stat>().is_err());
    }

    #[test]
    fn small_tree() {
        // keys inserted 2,1,3: a cherry
        let t = bst_from_permutation(&[2, 1, 3]).unwrap();
        let stats: Vec<Stat> = [
            "count(1)",
            "tree(binary:((..)(..)))",
            "protected(1)",
            "protected(2)",
            "outdegree(2)",
        ]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
        let v = evaluate_stats(TreeRef::Binary(&t), &stats).unwrap();
        let want: Vec<Value> = [2, 1, 1, 0, 1]
            .iter()
            .map(|&x| Value::Exact(rat(x, 1)))
            .collect();
        assert_eq!(v, want);
    }

    #[test]
    fn fast_path_matches_tree_path() {
        for model in [Model::Bst, Model::Rrt] {
            let stats = [
                Stat::Count(1),
                Stat::Count(3),
                Stat::Outdegree(0),
                Stat::Outdegree(1),
                Stat::Outdegree(2),
                Stat::Additive(Toll::LogSize),
            ];
            let stats = if model == Model::Bst {
                &stats[..]
            } else {
                &stats[..5]
            };
            let mut with_extra = stats.to_vec();
            with_extra.push(Stat::Protected(2));
            let mut a = TreeSampler::new();
            let mut b = TreeSampler::new();
            let (mut oa, mut ob) = (Vec::new(), Vec::new());
            for r in 0..50 {
                let mut ra = SeedSpec::new(11).stream(r);
                let mut rb = SeedSpec::new(11).stream(r);
                a.sample(model, 40, stats, &mut ra, &mut oa).unwrap();
                b.sample(model, 40, &with_extra, &mut rb, &mut ob).unwrap();
                assert_eq!(oa[..5], ob[..5], "{model}");
                if model == Model::Bst {
                    assert!((oa[5] - ob[5]).abs() < 1e-9 * oa[5].max(1.0));
                }
            }
        }
    }
}
