//! Exhaustive ground truth: every binary search tree (through all `n!`
//! insertion orders) and every recursive tree (through all `(n−1)!` parent
//! sequences), each with its exact uniform weight.
//!
//! Enumeration is split into partitions (by the first permutation element,
//! resp. the last parent label) processed on the rayon pool. Each partition
//! accumulates integer counts and the partitions are merged in order, so
//! results do not depend on the number of workers.

use std::collections::BTreeMap;

use fringe_core::devroye::StampCircle;
use fringe_core::error::Error as CoreError;
use fringe_core::perm::{factorial, for_each_permutation};
use fringe_core::rational::{fmt_rational, int, Rational, Value};
use fringe_core::stat::{evaluate_stats, Stat};
use fringe_core::trees::{fringe_key, BinaryTree, OrderedTree, TreeKey, TreeMode, TreeRef};
use fringe_core::Model;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::LabError;

/// Largest tree size the oracle enumerates.
pub const ORACLE_CAP: usize = 10;
/// Largest circle period for [`enumerate_stamp_circles`].
pub const CIRCLE_CAP: usize = 8;

fn check_cap(n: usize, cap: usize) -> Result<(), LabError> {
    if n == 0 {
        return Err(LabError::Invalid("tree size must be at least 1".into()));
    }
    let hard = cap.min(ORACLE_CAP);
    if n > hard {
        return Err(LabError::Capacity(format!("oracle enumeration limited to n <= {hard} (asked {n})")));
    }
    Ok(())
}

/// Number of trees enumerated for `n`.
pub fn tree_count(model: Model, n: usize) -> u64 {
    match model {
        Model::Bst => factorial(n).expect("capped"),
        Model::Rrt => factorial(n - 1).expect("capped"),
    }
}

fn partitions(model: Model, n: usize) -> usize {
    match model {
        Model::Bst => n,
        Model::Rrt => (n - 1).max(1),
    }
}

/// Visits the trees of partition `part` in a fixed order.
fn visit_partition(model: Model, n: usize, part: usize, visit: &mut dyn FnMut(TreeRef<'_>)) {
    match model {
        Model::Bst => {
            let mut bst = BinaryTree::empty();
            let mut stamps = vec![0u32; n];
            let first = part as u32;
            let rest: Vec<u32> = (0..n as u32).filter(|&x| x != first).collect();
            for_each_permutation(n - 1, |p| {
                stamps[0] = first + 1;
                for (i, &r) in p.iter().enumerate() {
                    stamps[i + 1] = rest[r as usize] + 1;
                }
                bst.rebuild_from_stamps(&stamps);
                visit(TreeRef::Binary(&bst));
            });
        }
        Model::Rrt => {
            let mut rrt = OrderedTree::single();
            if n == 1 {
                visit(TreeRef::Ordered(&rrt));
                return;
            }
            // parents[i] in 1..=i+1; the last one is fixed by the partition.
            let mut parents: Vec<u32> = vec![1; n - 1];
            parents[n - 2] = part as u32 + 1;
            loop {
                rrt = fringe_core::trees::rrt_from_attachments(
                    &parents.iter().map(|&p| p as usize).collect::<Vec<_>>(),
                )
                .expect("valid attachments");
                visit(TreeRef::Ordered(&rrt));
                // mixed-radix increment over the free digits 0..n-2
                let mut i = 0;
                loop {
                    if i + 1 >= n - 1 {
                        return;
                    }
                    if parents[i] < i as u32 + 1 {
                        parents[i] += 1;
                        break;
                    }
                    parents[i] = 1;
                    i += 1;
                }
            }
        }
    }
}

/// Runs `visit` over every tree, one accumulator per partition, and returns
/// the accumulators in partition order.
pub fn fold_trees<A: Send>(
    model: Model,
    n: usize,
    init: impl Fn() -> A + Sync,
    visit: impl Fn(&mut A, TreeRef<'_>) + Sync,
) -> Result<Vec<A>, LabError> {
    check_cap(n, ORACLE_CAP)?;
    Ok((0..partitions(model, n))
        .into_par_iter()
        .map(|part| {
            let mut acc = init();
            visit_partition(model, n, part, &mut |t| visit(&mut acc, t));
            acc
        })
        .collect())
}

/// Streams every tree with its weight `1/n!` resp. `1/(n−1)!`.
pub fn enumerate_model(model: Model, n: usize, mut visit: impl FnMut(TreeRef<'_>, &Rational)) -> Result<(), LabError> {
    check_cap(n, ORACLE_CAP)?;
    let w = Rational::new(1.into(), tree_count(model, n).into());
    for part in 0..partitions(model, n) {
        visit_partition(model, n, part, &mut |t| visit(t, &w));
    }
    Ok(())
}

/// Exact law of a (tuple) outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactLaw {
    pub support: BTreeMap<Vec<Rational>, Rational>,
}

impl ExactLaw {
    fn from_counts(counts: BTreeMap<Vec<Rational>, u64>, total: u64) -> Self {
        let total = Rational::from_integer(total.into());
        ExactLaw {
            support: counts
                .into_iter()
                .map(|(k, c)| (k, Rational::from_integer(c.into()) / &total))
                .collect(),
        }
    }

    pub fn total_mass(&self) -> Rational {
        self.support.values().fold(Rational::zero(), |a, b| a + b)
    }

    /// Law of coordinate `i`.
    pub fn marginal(&self, i: usize) -> ExactLaw {
        let mut support: BTreeMap<Vec<Rational>, Rational> = BTreeMap::new();
        for (k, m) in &self.support {
            *support.entry(vec![k[i].clone()]).or_insert_with(Rational::zero) += m;
        }
        ExactLaw { support }
    }

    pub fn mean(&self, i: usize) -> Rational {
        self.support.iter().fold(Rational::zero(), |a, (k, m)| a + &k[i] * m)
    }

    pub fn covariance(&self, i: usize, j: usize) -> Rational {
        let e = self.support.iter().fold(Rational::zero(), |a, (k, m)| a + &k[i] * &k[j] * m);
        e - self.mean(i) * self.mean(j)
    }

    pub fn variance(&self, i: usize) -> Rational {
        self.covariance(i, i)
    }

    /// Univariate integer law as `(value, mass)`; `None` if some outcome is
    /// not a nonnegative integer.
    pub fn integer_pmf(&self, i: usize) -> Option<Vec<(u64, f64)>> {
        let m = self.marginal(i);
        m.support
            .iter()
            .map(|(k, p)| {
                let v = &k[0];
                (v.is_integer() && !v.is_negative())
                    .then(|| (v.to_integer().to_u64().unwrap_or(u64::MAX), fringe_core::rational::to_f64(p)))
            })
            .collect()
    }

    /// `{"outcome": "p/q"}` with integer outcomes printed plainly and tuples
    /// as `(a,b)`.
    pub fn to_json(&self) -> serde_json::Value {
        let map = self
            .support
            .iter()
            .map(|(k, m)| (outcome_text(k), serde_json::Value::String(fmt_rational(m))))
            .collect();
        serde_json::Value::Object(map)
    }
}

fn outcome_text(k: &[Rational]) -> String {
    let one = |r: &Rational| if r.is_integer() { r.to_integer().to_string() } else { fmt_rational(r) };
    if k.len() == 1 {
        one(&k[0])
    } else {
        format!("({})", k.iter().map(one).collect::<Vec<_>>().join(","))
    }
}

fn exact_values(t: TreeRef<'_>, stats: &[Stat]) -> Result<Vec<Rational>, CoreError> {
    evaluate_stats(t, stats)?
        .into_iter()
        .map(|v| match v {
            Value::Exact(r) => Ok(r),
            Value::Real(_) => Err(CoreError::InvalidInput("statistic is not rational-valued".into())),
        })
        .collect()
}

/// Joint exact law of the statistics.
pub fn exact_law(model: Model, n: usize, stats: &[Stat]) -> Result<ExactLaw, LabError> {
    let parts = fold_trees(
        model,
        n,
        || (BTreeMap::<Vec<Rational>, u64>::new(), None::<CoreError>),
        |(acc, err), t| {
            if err.is_some() {
                return;
            }
            match exact_values(t, stats) {
                Ok(k) => *acc.entry(k).or_insert(0) += 1,
                Err(e) => *err = Some(e),
            }
        },
    )?;
    let mut counts = BTreeMap::new();
    for (m, err) in parts {
        if let Some(e) = err {
            return Err(e.into());
        }
        for (k, c) in m {
            *counts.entry(k).or_insert(0) += c;
        }
    }
    Ok(ExactLaw::from_counts(counts, tree_count(model, n)))
}

/// Exact means and covariance matrix of several statistics. Integer values
/// are accumulated in `i128`; other values exactly (or as reals when a
/// statistic is real-valued).
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable {
    pub means: Vec<Value>,
    pub cov: Vec<Vec<Value>>,
}

#[derive(Default)]
struct MomentAcc {
    isum: Vec<i128>,
    icross: Vec<i128>,
    vsum: Vec<Value>,
    vcross: Vec<Value>,
    err: Option<CoreError>,
}

fn as_i64(v: &Value) -> Option<i64> {
    match v {
        Value::Exact(r) if r.is_integer() => r.to_integer().to_i64(),
        _ => None,
    }
}

pub fn exact_moments_table(model: Model, n: usize, stats: &[Stat]) -> Result<MomentTable, LabError> {
    let d = stats.len();
    let parts = fold_trees(
        model,
        n,
        || MomentAcc {
            isum: vec![0; d],
            icross: vec![0; d * d],
            vsum: vec![Value::zero(); d],
            vcross: vec![Value::zero(); d * d],
            err: None,
        },
        |acc, t| {
            if acc.err.is_some() {
                return;
            }
            let vals = match evaluate_stats(t, stats) {
                Ok(v) => v,
                Err(e) => {
                    acc.err = Some(e);
                    return;
                }
            };
            let ints: Option<Vec<i64>> = vals.iter().map(as_i64).collect();
            match ints {
                Some(x) => {
                    for i in 0..d {
                        acc.isum[i] += x[i] as i128;
                        for j in i..d {
                            acc.icross[i * d + j] += x[i] as i128 * x[j] as i128;
                        }
                    }
                }
                None => {
                    for i in 0..d {
                        acc.vsum[i].add_assign(&vals[i]);
                        for j in i..d {
                            acc.vcross[i * d + j].add_assign(&(vals[i].clone() * vals[j].clone()));
                        }
                    }
                }
            }
        },
    )?;
    let mut isum = vec![0i128; d];
    let mut icross = vec![0i128; d * d];
    let mut vsum = vec![Value::zero(); d];
    let mut vcross = vec![Value::zero(); d * d];
    for p in parts {
        if let Some(e) = p.err {
            return Err(e.into());
        }
        for i in 0..d {
            isum[i] += p.isum[i];
            vsum[i].add_assign(&p.vsum[i]);
        }
        for i in 0..d * d {
            icross[i] += p.icross[i];
            vcross[i].add_assign(&p.vcross[i]);
        }
    }
    let total = Value::Exact(int(tree_count(model, n) as i64));
    let big = |x: i128| Value::Exact(Rational::from_integer(x.into()));
    let means: Vec<Value> = (0..d).map(|i| (big(isum[i]) + vsum[i].clone()) / total.clone()).collect();
    let mut cov = vec![vec![Value::zero(); d]; d];
    for i in 0..d {
        for j in i..d {
            let e = (big(icross[i * d + j]) + vcross[i * d + j].clone()) / total.clone();
            let c = e - means[i].clone() * means[j].clone();
            cov[i][j] = c.clone();
            cov[j][i] = c;
        }
    }
    Ok(MomentTable { means, cov })
}

/// `(E X, Var X)`.
pub fn exact_moments(model: Model, n: usize, stat: &Stat) -> Result<(Value, Value), LabError> {
    let t = exact_moments_table(model, n, std::slice::from_ref(stat))?;
    Ok((t.means[0].clone(), t.cov[0][0].clone()))
}

pub fn exact_cov(model: Model, n: usize, a: &Stat, b: &Stat) -> Result<Value, LabError> {
    let t = exact_moments_table(model, n, &[a.clone(), b.clone()])?;
    Ok(t.cov[0][1].clone())
}

/// `p_{k,T}` for every shape of size `k` in the given mode (binary for
/// binary search trees; ordered or unordered for recursive trees).
pub fn exact_shape_probs(model: Model, k: usize, mode: TreeMode) -> Result<BTreeMap<TreeKey, Rational>, LabError> {
    let ok = match model {
        Model::Bst => mode == TreeMode::Binary,
        Model::Rrt => mode != TreeMode::Binary,
    };
    if !ok {
        return Err(LabError::Invalid(format!("{mode} shapes do not apply to {model}")));
    }
    let parts = fold_trees(model, k, BTreeMap::<TreeKey, u64>::new, |acc, t| {
        let root = t.root().expect("nonempty");
        let key = fringe_key(t, root, mode).expect("mode checked");
        *acc.entry(key).or_insert(0) += 1;
    })?;
    let mut counts: BTreeMap<TreeKey, u64> = BTreeMap::new();
    for p in parts {
        for (key, c) in p {
            *counts.entry(key).or_insert(0) += c;
        }
    }
    let total = Rational::from_integer(tree_count(model, k).into());
    Ok(counts
        .into_iter()
        .map(|(key, c)| (key, Rational::from_integer(c.into()) / &total))
        .collect())
}

/// `P(Po(λ) = j)`, computed in log space.
pub fn poisson_pmf(lambda: f64, j: u64) -> f64 {
    if lambda == 0.0 {
        return if j == 0 { 1.0 } else { 0.0 };
    }
    let jf = j as f64;
    (-lambda + jf * lambda.ln() - libm::lgamma(jf + 1.0)).exp()
}

/// `½ Σ_j |law(j) − Po(λ)(j)|` over `j ≤ J`, plus half the Poisson mass
/// beyond `J`, where `J` covers the support and the Poisson tail beyond it
/// is below `1e−12`.
pub fn tv_to_poisson(pmf: &[(u64, f64)], lambda: f64) -> f64 {
    let law: BTreeMap<u64, f64> = pmf.iter().copied().collect();
    let top = law.keys().next_back().copied().unwrap_or(0);
    let mut sum = 0.0;
    let mut po_mass = 0.0;
    let mut j = 0u64;
    loop {
        let po = poisson_pmf(lambda, j);
        let q = law.get(&j).copied().unwrap_or(0.0);
        sum += (q - po).abs();
        po_mass += po;
        // beyond 2λ the pmf ratio is below 1/2, so the tail is < 2·po
        if j >= top && j as f64 > 2.0 * lambda && 2.0 * po < 1e-12 {
            break;
        }
        j += 1;
    }
    (0.5 * (sum + (1.0 - po_mass).max(0.0))).clamp(0.0, 1.0)
}

/// Exact total variation distance between an integer law and `Po(λ)`.
pub fn exact_tv_to_poisson(law: &ExactLaw, lambda: f64) -> Result<f64, LabError> {
    let pmf = law
        .integer_pmf(0)
        .ok_or_else(|| LabError::Invalid("law is not on the nonnegative integers".into()))?;
    Ok(tv_to_poisson(&pmf, lambda))
}

/// Visits every circle of period `p <= 8` (uniform weight `1/p!`).
pub fn enumerate_stamp_circles(p: usize, mut visit: impl FnMut(&StampCircle)) -> Result<(), LabError> {
    if p == 0 || p > CIRCLE_CAP {
        return Err(LabError::Capacity(format!("circle enumeration limited to 1 <= p <= {CIRCLE_CAP}")));
    }
    for_each_permutation(p, |ranks| {
        let c = StampCircle::new(ranks.to_vec()).expect("permutation");
        visit(&c);
    });
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use fringe_core::rational::rat;
    use fringe_core::trees::Property;

    fn exact(v: &Value) -> Rational {
        v.as_exact().cloned().expect("exact")
    }

    #[test]
    fn enumeration_weights() {
        for model in [Model::Bst, Model::Rrt] {
            for n in 1..=6 {
                let mut total = Rational::zero();
                let mut count = 0;
                enumerate_model(model, n, |_, w| {
                    total += w;
                    count += 1;
                })
                .unwrap();
                assert_eq!(total, rat(1, 1));
                assert_eq!(count, tree_count(model, n));
            }
        }
        assert!(matches!(enumerate_model(Model::Bst, 11, |_, _| {}), Err(LabError::Capacity(_))));
    }

    #[test]
    fn shapes() {
        let p = exact_shape_probs(Model::Bst, 3, TreeMode::Binary).unwrap();
        assert_eq!(p.len(), 5);
        let cherry = TreeKey::parse(TreeMode::Binary, "((..)(..))").unwrap();
        assert_eq!(p[&cherry], rat(1, 3));
        let q = exact_shape_probs(Model::Rrt, 3, TreeMode::Unordered).unwrap();
        assert_eq!(q.len(), 2);
        assert!(q.values().all(|m| *m == rat(1, 2)));
        assert_eq!(exact_shape_probs(Model::Bst, 1, TreeMode::Binary).unwrap().len(), 1);
    }

    #[test]
    fn moments() {
        let (m, v) = exact_moments(Model::Bst, 8, &Stat::Count(1)).unwrap();
        assert_eq!((exact(&m), exact(&v)), (rat(3, 1), rat(2, 5)));
        let (m, v) = exact_moments(Model::Bst, 8, &Stat::Protected(2)).unwrap();
        assert_eq!((exact(&m), exact(&v)), (rat(23, 10), rat(29, 25)));
        let leaf = Stat::TreeCount(TreeKey::parse(TreeMode::Binary, "(..)").unwrap());
        let cherry = Stat::PropertyCount { k: 3, property: Property::Cherry };
        assert_eq!(exact(&exact_cov(Model::Bst, 9, &leaf, &cherry).unwrap()), rat(4, 21));
        let (m, _) = exact_moments(Model::Rrt, 7, &Stat::Count(2)).unwrap();
        assert_eq!(exact(&m), rat(7, 6));
    }

    #[test]
    fn laws_and_tv() {
        let law = exact_law(Model::Bst, 5, &[Stat::Count(2), Stat::Count(1)]).unwrap();
        assert_eq!(law.total_mass(), rat(1, 1));
        let direct = exact_law(Model::Bst, 5, &[Stat::Count(2)]).unwrap();
        assert_eq!(law.marginal(0), direct);
        let delta0 = ExactLaw { support: [(vec![rat(0, 1)], rat(1, 1))].into_iter().collect() };
        assert_eq!(exact_tv_to_poisson(&delta0, 0.0).unwrap(), 0.0);
        let delta1 = ExactLaw { support: [(vec![rat(1, 1)], rat(1, 1))].into_iter().collect() };
        let tv = exact_tv_to_poisson(&delta1, 1.0).unwrap();
        assert!((tv - (1.0 - (-1.0f64).exp())).abs() < 1e-12);
        let j = law.to_json();
        assert!(j.as_object().unwrap().keys().all(|k| k.starts_with('(')));
    }

    #[test]
    fn circles() {
        let mut c = 0;
        enumerate_stamp_circles(2, |_| c += 1).unwrap();
        assert_eq!(c, 2);
        assert!(enumerate_stamp_circles(9, |_| {}).is_err());
    }

    #[test]
    fn partition_count_does_not_matter() {
        // the sequential stream and the partitioned fold agree
        let mut seq = BTreeMap::new();
        enumerate_model(Model::Rrt, 6, |t, _| {
            let v = exact_values(t, &[Stat::Count(1)]).unwrap();
            *seq.entry(v).or_insert(0u64) += 1;
        })
        .unwrap();
        let law = exact_law(Model::Rrt, 6, &[Stat::Count(1)]).unwrap();
        assert_eq!(law, ExactLaw::from_counts(seq, 120));
    }
}
