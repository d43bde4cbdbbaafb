//! Mean and variance of additive functionals `F(T) = Σ_v f(T(v))` for every
//! `n`, their limits, and the per-size inputs `μ_k = E f(T_k)` and
//! `c_k = E f(T_k)(2F(T_k) − f(T_k))` computed from exact shape laws.

use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::model::Model;
use crate::rational::{Scalar, Value};
use crate::trees::{
    additive_functional, all_binary_trees, all_ordered_trees, shape_prob, Fringe, TollFunction,
    TreeMode, TreeRef,
};

use super::gamma::{gamma_limit, gamma_star, normalizer, pi_kn, pi_limit};

/// Largest size for which [`toll_moments`] enumerates shapes.
pub const MOMENT_ENUMERATION_CAP: usize = 12;

fn weights<S: Scalar>(model: Model, n: usize) -> (S, Vec<S>) {
    let norm = S::from_rational(&normalizer(model, n));
    let pis = (1..=n)
        .map(|k| S::from_rational(&pi_kn(model, n, k)))
        .collect();
    (norm, pis)
}

fn need(len: usize, n: usize, what: &str) -> Result<()> {
    if len < n {
        Err(invalid(alloc::format!(
            "{what} given for k <= {len}, need k <= {n}"
        )))
    } else {
        Ok(())
    }
}

/// `E F = (n+1) Σ_k π_{k,n} μ_k` (binary search tree) or `n Σ_k π̂_{k,n} μ_k`;
/// `mu[k - 1] = μ_k`.
pub fn mean_f<S: Scalar>(model: Model, n: usize, mu: &[S]) -> Result<S> {
    need(mu.len(), n, "mu")?;
    let (norm, pis) = weights::<S>(model, n);
    let mut acc = S::zero();
    for (p, m) in pis.into_iter().zip(mu) {
        acc = acc + p * m.clone();
    }
    Ok(norm * acc)
}

/// `Var F = N (Σ_k π_{k,n} c_k − Σ_k Σ_m γ*(k,m) μ_k μ_m)` with `N = n + 1`
/// or `n`.
pub fn var_f<S: Scalar>(model: Model, n: usize, mu: &[S], cross: &[S]) -> Result<S> {
    need(mu.len(), n, "mu")?;
    need(cross.len(), n, "cross moments")?;
    let (norm, pis) = weights::<S>(model, n);
    let mut acc = S::zero();
    for (p, c) in pis.into_iter().zip(cross) {
        acc = acc + p * c.clone();
    }
    acc = acc - gamma_quadratic(mu, |k, m| S::from_rational(&gamma_star(model, n, k, m)), n);
    Ok(norm * acc)
}

/// `Σ_{k,m ≤ n} g(k,m) μ_k μ_m`, skipping zero means.
fn gamma_quadratic<S: Scalar>(mu: &[S], g: impl Fn(usize, usize) -> S, n: usize) -> S {
    let nz: Vec<usize> = (1..=n)
        .filter(|&k| mu[k - 1].abs_val() > S::zero())
        .collect();
    let mut acc = S::zero();
    for (a, &k) in nz.iter().enumerate() {
        for &m in &nz[a..] {
            let term = g(k, m) * mu[k - 1].clone() * mu[m - 1].clone();
            acc = if k == m {
                acc + term
            } else {
                acc + term.clone() + term
            };
        }
    }
    acc
}

/// Per-size inputs for [`mean_f`] and [`var_f`].
#[derive(Debug, Clone, PartialEq)]
pub struct TollMoments {
    /// `μ_k = E f(T_k)`.
    pub mu: Vec<Value>,
    /// `c_k = E f(T_k)(2F(T_k) − f(T_k))`.
    pub cross: Vec<Value>,
}

/// Mode used to enumerate shapes for a model: binary trees, or ordered
/// trees (whose law refines the unordered one).
pub fn shape_mode(model: Model) -> TreeMode {
    match model {
        Model::Bst => TreeMode::Binary,
        Model::Rrt => TreeMode::Ordered,
    }
}

/// `μ_k`, `c_k` for `k = 1..=k_max` by summing over all shapes of size `k`
/// weighted by their exact probabilities. Sizes above the toll's support
/// bound contribute zeros without enumeration.
pub fn toll_moments(model: Model, f: &dyn TollFunction, k_max: usize) -> Result<TollMoments> {
    let bound = f.support_bound().unwrap_or(usize::MAX);
    let mut mu = Vec::with_capacity(k_max);
    let mut cross = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        if k > bound {
            mu.push(Value::zero());
            cross.push(Value::zero());
            continue;
        }
        if k > MOMENT_ENUMERATION_CAP {
            return Err(Error::Capacity(alloc::format!(
                "shape enumeration limited to k <= {MOMENT_ENUMERATION_CAP} (asked {k})"
            )));
        }
        let (m, c) = match model {
            Model::Bst => moments_over(all_binary_trees(k).iter().map(TreeRef::from), model, f)?,
            Model::Rrt => moments_over(all_ordered_trees(k).iter().map(TreeRef::from), model, f)?,
        };
        mu.push(m);
        cross.push(c);
    }
    Ok(TollMoments { mu, cross })
}

fn moments_over<'a>(
    trees: impl Iterator<Item = TreeRef<'a>>,
    model: Model,
    f: &dyn TollFunction,
) -> Result<(Value, Value)> {
    let mut m = Value::zero();
    let mut c = Value::zero();
    for t in trees {
        let p = Value::Exact(shape_prob(t, shape_mode(model))?);
        let (root_val, total) = root_and_total(t, f)?;
        m.add_assign(&(p.clone() * root_val.clone()));
        let two_f = total.clone() + total;
        c.add_assign(&(p * root_val.clone() * (two_f - root_val)));
    }
    Ok((m, c))
}

/// `(f(T), F(T))`.
pub fn root_and_total(t: TreeRef<'_>, f: &dyn TollFunction) -> Result<(Value, Value)> {
    let sizes = t.subtree_sizes();
    let root = t.root().ok_or_else(|| invalid("empty tree"))?;
    let root_val = f.evaluate(&Fringe::new(t, root, &sizes));
    Ok((root_val, additive_functional(t, f)?))
}

/// A truncated series with its truncation index and, when known, a bound on
/// the omitted tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartialSum {
    pub value: f64,
    pub terms: usize,
    pub tail_bound: Option<f64>,
}

/// `Σ_{k ≤ K} π_k μ_k` with `K = mu.len()`. When `sup_tail` bounds
/// `|μ_k|` for `k > K`, the tail is at most `sup_tail · Σ_{k>K} π_k`,
/// which is `2/(K+2)` resp. `1/(K+1)` times `sup_tail`.
pub fn asymptotic_mu_f(model: Model, mu: &[f64], sup_tail: Option<f64>) -> PartialSum {
    let k_max = mu.len();
    let value = mu
        .iter()
        .enumerate()
        .map(|(i, &m)| {
            let k = (i + 1) as f64;
            let w = match model {
                Model::Bst => 2.0 / ((k + 1.0) * (k + 2.0)),
                Model::Rrt => 1.0 / (k * (k + 1.0)),
            };
            w * m
        })
        .sum();
    let tail_mass = match model {
        Model::Bst => 2.0 / (k_max as f64 + 2.0),
        Model::Rrt => 1.0 / (k_max as f64 + 1.0),
    };
    PartialSum {
        value,
        terms: k_max,
        tail_bound: sup_tail.map(|s| s * tail_mass),
    }
}

/// Truncated limit variance `Σ_{k ≤ N} π_k c_k − Σ_{k,m ≤ N} γ(k,m) μ_k μ_m`,
/// i.e. the sum of `f(T) f(T′) σ_{T,T′}` over all shapes of size at most
/// `N`.
pub fn asymptotic_sigma2_f(model: Model, f: &dyn TollFunction, n_max: usize) -> Result<Value> {
    let mo = toll_moments(model, f, n_max)?;
    let mut acc = Value::zero();
    for k in 1..=n_max {
        acc.add_assign(&(Value::Exact(pi_limit(model, k)) * mo.cross[k - 1].clone()));
    }
    let quad = gamma_quadratic(&mo.mu, |k, m| Value::Exact(gamma_limit(model, k, m)), n_max);
    Ok(acc - quad)
}

/// `B = (Σ_k k^{-3/2} √Var f(T_k))² + sup_k Var f(T_k)/k + Σ_k μ_k²/k²`;
/// `vars[k - 1]`, `mus[k - 1]`.
pub fn tny_bracket(vars: &[f64], mus: &[f64]) -> f64 {
    let mut a = 0.0;
    let mut sup = 0.0f64;
    for (i, &v) in vars.iter().enumerate() {
        let k = (i + 1) as f64;
        a += libm::sqrt(v.max(0.0)) / (k * libm::sqrt(k));
        sup = sup.max(v / k);
    }
    let c: f64 = mus
        .iter()
        .enumerate()
        .map(|(i, &m)| {
            let k = (i + 1) as f64;
            m * m / (k * k)
        })
        .sum();
    a * a + sup + c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::counts::{mean_count, var_count};
    use crate::rational::{rat, Rational};
    use crate::trees::{Toll, TreeKey};

    #[test]
    fn indicator_reduces_to_counts() {
        for model in [Model::Bst, Model::Rrt] {
            for k0 in 1..4 {
                let mo = toll_moments(model, &Toll::SizeIndicator(k0), 9).unwrap();
                for n in k0..=9 {
                    let m = mean_f(model, n, &mo.mu).unwrap();
                    assert_eq!(m, Value::Exact(mean_count(model, n, k0)));
                    let v = var_f(model, n, &mo.mu, &mo.cross).unwrap();
                    assert_eq!(
                        v,
                        Value::Exact(var_count(model, n, k0)),
                        "{model} n={n} k={k0}"
                    );
                }
            }
        }
    }

    #[test]
    fn protected_two_moments() {
        let mo = toll_moments(Model::Bst, &Toll::LeafProtectedCombo, 10).unwrap();
        for n in 4..=10usize {
            let m = mean_f(Model::Bst, n, &mo.mu).unwrap();
            assert_eq!(m, Value::Exact(rat(11 * n as i64 - 19, 30)));
        }
        for n in 8..=10usize {
            let v = var_f(Model::Bst, n, &mo.mu, &mo.cross).unwrap();
            assert_eq!(v, Value::Exact(rat(29 * (n as i64 + 1), 225)));
        }
        // p_k = 1 - 2/k route
        let mu: Vec<Rational> = (1..=12)
            .map(|k| match k {
                1 | 2 => rat(0, 1),
                3 => rat(2, 3),
                _ => rat(k - 2, k),
            })
            .collect();
        for n in 4..=12usize {
            assert_eq!(
                mean_f(Model::Bst, n, &mu).unwrap(),
                rat(11 * n as i64 - 19, 30)
            );
        }
    }

    #[test]
    fn rrt_leaves_variance() {
        let mo = toll_moments(Model::Rrt, &Toll::SizeIndicator(1), 9).unwrap();
        for n in 3..=9usize {
            let v = var_f(Model::Rrt, n, &mo.mu, &mo.cross).unwrap();
            assert_eq!(v, Value::Exact(rat(n as i64, 12)));
        }
    }

    #[test]
    fn limit_constants() {
        let s = asymptotic_mu_f(Model::Bst, &[1.0], Some(0.0));
        assert!((s.value - 1.0 / 3.0).abs() < 1e-15);
        let mu: Vec<f64> = (1..=2000)
            .map(|k| if k >= 2 { 2.0 / k as f64 } else { 0.0 })
            .collect();
        let s = asymptotic_mu_f(Model::Bst, &mu, Some(1.0 / 2000.0));
        assert!((s.value - 1.0 / 3.0).abs() < 1e-6);
        let leaf = Toll::TreeMatch(TreeKey::parse(TreeMode::Binary, "(..)").unwrap());
        assert_eq!(
            asymptotic_sigma2_f(Model::Bst, &leaf, 1).unwrap(),
            Value::Exact(rat(2, 45))
        );
        assert_eq!(tny_bracket(&[0.0], &[1.0]), 1.0);
        assert_eq!(tny_bracket(&[], &[]), 0.0);
    }
}
