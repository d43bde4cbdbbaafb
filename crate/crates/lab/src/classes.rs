//! Count statistics viewed as fringe classes `(k, P)`: `X^P_{n,k}` counts
//! fringe subtrees of size `k` with property `P`. The closed forms need
//! `p_{k,P}` and `E[1{T_k ∈ P} X^{P′}_{k,m}(T_k)]`; both are computed here
//! by summing exact shape probabilities, without enumerating trees of size
//! `n`.

use fringe_core::exact::{cov_sized, gamma_limit, mean_count_property, pi_limit, shape_mode, var_count_property};
use fringe_core::rational::Rational;
use fringe_core::stat::Stat;
use fringe_core::trees::{all_trees, count_property, shape_prob, Fringe, Property};
use fringe_core::Model;
use num_traits::Zero;

use crate::LabError;

/// `(k, P)` for count statistics.
pub fn fringe_class(stat: &Stat) -> Option<(usize, Property)> {
    match stat {
        Stat::Count(k) => Some((*k, Property::Any)),
        Stat::TreeCount(key) => Some((key.size(), Property::Tree(key.clone()))),
        Stat::PropertyCount { k, property } => Some((*k, property.clone())),
        _ => None,
    }
}

fn root_has(t: fringe_core::trees::TreeRef<'_>, p: &Property) -> Result<bool, LabError> {
    let sizes = t.subtree_sizes();
    let root = t.root().ok_or_else(|| LabError::Invalid("empty tree".into()))?;
    Ok(p.holds(&Fringe::new(t, root, &sizes))?)
}

/// Largest class size handled by shape enumeration.
pub const CLASS_SIZE_CAP: usize = 10;

/// `Σ_T p_{k,T} g(T)` over the shapes of size `k` in the model's mode.
fn shape_sum(
    model: Model,
    k: usize,
    mut g: impl FnMut(fringe_core::trees::TreeRef<'_>) -> Result<Rational, LabError>,
) -> Result<Rational, LabError> {
    if k > CLASS_SIZE_CAP {
        return Err(LabError::Capacity(format!("shape enumeration limited to k <= {CLASS_SIZE_CAP}")));
    }
    let mode = shape_mode(model);
    let mut acc = Rational::zero();
    for t in all_trees(mode, k) {
        let r = t.as_ref();
        let w = g(r)?;
        if !w.is_zero() {
            acc += shape_prob(r, mode)? * w;
        }
    }
    Ok(acc)
}

/// `p_{k,P} = P(T_k ∈ P)`.
pub fn class_prob(model: Model, k: usize, p: &Property) -> Result<Rational, LabError> {
    if k == 0 {
        return Ok(Rational::zero());
    }
    shape_sum(model, k, |t| Ok(if root_has(t, p)? { Rational::from_integer(1.into()) } else { Rational::zero() }))
}

/// `E[1{T_k ∈ P} X^{P′}_{k,m}(T_k)]` for `m ≤ k`.
pub fn class_cross(model: Model, (k, p): (usize, &Property), (m, p2): (usize, &Property)) -> Result<Rational, LabError> {
    shape_sum(model, k, |t| {
        if !root_has(t, p)? {
            return Ok(Rational::zero());
        }
        Ok(Rational::from_integer(count_property(t, m, p2)?.into()))
    })
}

fn ordered<'a>(a: &'a (usize, Property), b: &'a (usize, Property)) -> (&'a (usize, Property), &'a (usize, Property)) {
    if a.0 >= b.0 {
        (a, b)
    } else {
        (b, a)
    }
}

/// Exact `E X` for a count statistic at size `n`.
pub fn class_mean(model: Model, n: usize, c: &(usize, Property)) -> Result<Rational, LabError> {
    Ok(mean_count_property(model, n, c.0, &class_prob(model, c.0, &c.1)?))
}

/// Exact `Var X` for a count statistic at size `n`.
pub fn class_var(model: Model, n: usize, c: &(usize, Property)) -> Result<Rational, LabError> {
    Ok(var_count_property(model, n, c.0, &class_prob(model, c.0, &c.1)?))
}

/// Exact covariance of two count statistics at size `n`.
pub fn class_cov(model: Model, n: usize, a: &(usize, Property), b: &(usize, Property)) -> Result<Rational, LabError> {
    let (big, small) = ordered(a, b);
    if small.0 == 0 {
        return Ok(Rational::zero());
    }
    let e = class_cross(model, (big.0, &big.1), (small.0, &small.1))?;
    let pf = class_prob(model, big.0, &big.1)?;
    let pg = class_prob(model, small.0, &small.1)?;
    Ok(cov_sized(model, n, big.0, small.0, &e, &pf, &pg)?)
}

/// Limit slope `lim Cov / n` of two count statistics.
pub fn class_slope(model: Model, a: &(usize, Property), b: &(usize, Property)) -> Result<Rational, LabError> {
    let (big, small) = ordered(a, b);
    let e = class_cross(model, (big.0, &big.1), (small.0, &small.1))?;
    let pf = class_prob(model, big.0, &big.1)?;
    let pg = class_prob(model, small.0, &small.1)?;
    Ok(pi_limit(model, big.0) * e - gamma_limit(model, big.0, small.0) * pf * pg)
}

/// Matrix of limit slopes for count statistics.
pub fn slope_matrix(model: Model, stats: &[Stat]) -> Result<Vec<Vec<Rational>>, LabError> {
    let classes: Vec<(usize, Property)> = stats
        .iter()
        .map(|s| fringe_class(s).ok_or_else(|| LabError::Invalid(format!("{s} is not a fringe count"))))
        .collect::<Result<_, _>>()?;
    classes
        .iter()
        .map(|a| classes.iter().map(|b| class_slope(model, a, b)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use fringe_core::exact::sigma_size;
    use fringe_core::rational::rat;
    use fringe_core::trees::{TreeKey, TreeMode};

    #[test]
    fn known_slopes() {
        let leaf = (1, Property::Tree(TreeKey::parse(TreeMode::Binary, "(..)").unwrap()));
        let cherry = (3, Property::Cherry);
        assert_eq!(class_prob(Model::Bst, 3, &Property::Cherry).unwrap(), rat(1, 3));
        assert_eq!(class_slope(Model::Bst, &leaf, &leaf).unwrap(), rat(2, 45));
        assert_eq!(class_slope(Model::Bst, &cherry, &leaf).unwrap(), rat(2, 105));
        assert_eq!(class_slope(Model::Bst, &cherry, &cherry).unwrap(), rat(43, 1575));
        for model in [Model::Bst, Model::Rrt] {
            for k in 1..5 {
                for m in 1..=k {
                    let s = class_slope(model, &(k, Property::Any), &(m, Property::Any)).unwrap();
                    assert_eq!(s, sigma_size(model, k, m));
                }
            }
        }
        assert_eq!(class_cov(Model::Bst, 9, &leaf, &cherry).unwrap(), rat(4, 21));
        assert_eq!(class_prob(Model::Bst, 3, &Property::RightPath).unwrap(), rat(1, 6));
    }
}
