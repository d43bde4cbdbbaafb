//! Variance of additive functionals through the split recursion: for tolls
//! that only see the sizes of the root's subtrees, `Var F(T_n)` is an
//! additive functional of the toll `ψ_{|T|}`.
//!
//! Binary search tree: `ψ_k = E(ν_I + ν_{k-1-I} + f(k, I, k-1-I) − ν_k)²`
//! with `I` uniform on `0..k` and `ν_k = E F(T_k)`. Recursive tree: the
//! principal subtree sizes `(s_1, …, s_d)` of `Λ_k`, listed by label of the
//! child, have law `Π_j 1/(r_j − 1)` where `r_1 = k`, `r_{j+1} = r_j − s_j`
//! and the list ends when `r = 1` (the subtree of the smallest child is
//! uniform on `1..r−1` and the rest is again a recursive tree).

use alloc::vec::Vec;

use num_traits::Zero;

use crate::error::{invalid, Error, Result};
use crate::model::Model;
use crate::rational::{rat, Rational, Scalar, Value};
use crate::rng::SeedSpec;
use crate::trees::TollFunction;

use super::gamma::{normalizer, pi_kn, pi_limit};

/// `nu[k] = ν_k`, `psi[k] = ψ_k` for `k = 0..=K` (`ν_0 = ψ_0 = 0`).
#[derive(Debug, Clone, PartialEq)]
pub struct PsiTable<S> {
    pub nu: Vec<S>,
    pub psi: Vec<S>,
}

/// `ν_k` from `ef[k] = E f(k, I, k−1−I)` (index 0 unused):
/// `ν_k = ef[k] + (2/k) Σ_{i<k} ν_i`. O(K).
pub fn nu_bst_from_means<S: Scalar>(ef: &[S]) -> Vec<S> {
    let mut nu = alloc::vec![S::zero(); ef.len()];
    let mut prefix = S::zero();
    for k in 1..ef.len() {
        nu[k] = ef[k].clone() + S::from_ratio(2, k as i64) * prefix.clone();
        prefix = prefix + nu[k].clone();
    }
    nu
}

/// `E f(k, I, k−1−I)`.
pub fn mean_split_toll<S: Scalar>(f: &impl Fn(usize, usize, usize) -> S, k: usize) -> S {
    let mut acc = S::zero();
    for i in 0..k {
        acc = acc + f(k, i, k - 1 - i);
    }
    acc / S::from_ratio(k as i64, 1)
}

/// `ψ_k` given `ν_0..=ν_k`, summed as squared deviations.
pub fn psi_bst_at<S: Scalar>(f: &impl Fn(usize, usize, usize) -> S, nu: &[S], k: usize) -> S {
    let mut acc = S::zero();
    for i in 0..k {
        let d = nu[i].clone() + nu[k - 1 - i].clone() + f(k, i, k - 1 - i) - nu[k].clone();
        acc = acc + d.clone() * d;
    }
    acc / S::from_ratio(k as i64, 1)
}

/// Full table up to `k_max`. O(K²).
pub fn psi_bst<S: Scalar>(f: impl Fn(usize, usize, usize) -> S, k_max: usize) -> PsiTable<S> {
    let mut ef = alloc::vec![S::zero(); k_max + 1];
    for (k, e) in ef.iter_mut().enumerate().skip(1) {
        *e = mean_split_toll(&f, k);
    }
    let nu = nu_bst_from_means(&ef);
    let mut psi = alloc::vec![S::zero(); k_max + 1];
    for (k, p) in psi.iter_mut().enumerate().skip(1) {
        *p = psi_bst_at(&f, &nu, k);
    }
    PsiTable { nu, psi }
}

/// `Var F = N Σ_{k<n} π_{k,n} ψ_k + ψ_n`.
pub fn var_from_psi<S: Scalar>(model: Model, psi: &[S], n: usize) -> Result<S> {
    if psi.len() <= n {
        return Err(invalid(alloc::format!(
            "psi known up to {}, need {n}",
            psi.len().saturating_sub(1)
        )));
    }
    let mut acc = S::zero();
    for (k, p) in psi.iter().enumerate().take(n).skip(1) {
        acc = acc + S::from_rational(&pi_kn(model, n, k)) * p.clone();
    }
    Ok(S::from_rational(&normalizer(model, n)) * acc + psi[n].clone())
}

/// `Σ_{k ≤ K} π_k ψ_k` (the limit variance truncated at `K = psi.len() − 1`).
pub fn sigma2_from_psi(model: Model, psi: &[f64]) -> f64 {
    psi.iter()
        .enumerate()
        .skip(1)
        .map(|(k, &p)| crate::rational::to_f64(&pi_limit(model, k)) * p)
        .sum()
}

/// The split toll `f(n, l, r)` of a binary toll, or an error if it is not
/// of that shape.
pub fn binary_split_toll(
    f: &dyn TollFunction,
) -> Result<impl Fn(usize, usize, usize) -> Value + '_> {
    if f.binary_parts(1, 0, 0).is_none() {
        return Err(Error::InvalidInput(
            "toll does not depend on subtree sizes only".into(),
        ));
    }
    Ok(move |n, l, r| f.binary_parts(n, l, r).expect("split toll"))
}

/// The composition toll `f(n, (s_1, …, s_d))` of a recursive-tree toll.
pub fn recursive_split_toll(
    f: &dyn TollFunction,
) -> Result<impl Fn(usize, &[usize]) -> Value + '_> {
    if f.recursive_parts(1, &[]).is_none() {
        return Err(Error::InvalidInput(
            "toll does not depend on principal subtree sizes only".into(),
        ));
    }
    Ok(move |n, s: &[usize]| f.recursive_parts(n, s).expect("split toll"))
}

/// Largest `k` whose principal-size law is enumerated exactly.
pub const RRT_EXACT_CAP: usize = 16;

/// Visits every composition `(s_1, …, s_d)` of `k − 1` with its exact
/// probability under the recursive-tree law.
pub fn for_each_principal_composition(k: usize, mut visit: impl FnMut(&[usize], &Rational)) {
    fn go(
        r: usize,
        parts: &mut Vec<usize>,
        w: &Rational,
        visit: &mut dyn FnMut(&[usize], &Rational),
    ) {
        if r == 1 {
            visit(parts, w);
            return;
        }
        let step = w * rat(1, (r - 1) as i64);
        for s in 1..r {
            parts.push(s);
            go(r - s, parts, &step, visit);
            parts.pop();
        }
    }
    if k == 0 {
        return;
    }
    go(k, &mut Vec::new(), &rat(1, 1), &mut visit);
}

/// Exact recursive-tree table up to `k_max ≤ RRT_EXACT_CAP`.
pub fn psi_rrt_exact(
    f: impl Fn(usize, &[usize]) -> Value,
    k_max: usize,
) -> Result<PsiTable<Value>> {
    if k_max > RRT_EXACT_CAP {
        return Err(Error::Capacity(alloc::format!(
            "exact principal-size law limited to k <= {RRT_EXACT_CAP}"
        )));
    }
    let mut nu = alloc::vec![Value::zero(); k_max + 1];
    let mut psi = alloc::vec![Value::zero(); k_max + 1];
    for k in 1..=k_max {
        let mut terms: Vec<(Rational, Value)> = Vec::new();
        for_each_principal_composition(k, |parts, w| {
            let mut g = f(k, parts);
            for &s in parts {
                g = g + nu[s].clone();
            }
            terms.push((w.clone(), g));
        });
        let mean = terms.iter().fold(Value::zero(), |a, (w, g)| {
            a + Value::Exact(w.clone()) * g.clone()
        });
        let var = terms.iter().fold(Value::zero(), |a, (w, g)| {
            let d = g.clone() - mean.clone();
            a + Value::Exact(w.clone()) * d.clone() * d
        });
        nu[k] = mean;
        psi[k] = var;
    }
    Ok(PsiTable { nu, psi })
}

/// Recursive-tree table with Monte Carlo estimates above `exact_upto`.
#[derive(Debug, Clone, PartialEq)]
pub struct RrtPsi {
    pub nu: Vec<f64>,
    pub psi: Vec<f64>,
    /// Standard error of each `ψ_k` estimate (0 where exact).
    pub psi_se: Vec<f64>,
    pub exact_upto: usize,
}

/// Exact up to `exact_upto`, then `reps` sampled compositions per size,
/// drawn from stream `k` of `seed`.
pub fn psi_rrt_mc(
    f: impl Fn(usize, &[usize]) -> f64,
    k_max: usize,
    exact_upto: usize,
    reps: usize,
    seed: u64,
) -> Result<RrtPsi> {
    let exact_upto = exact_upto.min(k_max);
    let ex = psi_rrt_exact(|n, s| Value::Real(f(n, s)), exact_upto)?;
    let mut nu: Vec<f64> = ex.nu.iter().map(Value::to_f64).collect();
    let mut psi: Vec<f64> = ex.psi.iter().map(Value::to_f64).collect();
    let mut psi_se = alloc::vec![0.0; exact_upto + 1];
    let spec = SeedSpec::new(seed);
    let mut parts = Vec::new();
    let mut samples = Vec::with_capacity(reps);
    for k in exact_upto + 1..=k_max {
        let mut rng = spec.stream(k as u64);
        samples.clear();
        for _ in 0..reps.max(2) {
            parts.clear();
            let mut r = k;
            while r > 1 {
                let s = rng.below(r as u64 - 1) as usize + 1;
                parts.push(s);
                r -= s;
            }
            let g = f(k, &parts) + parts.iter().map(|&s| nu[s]).sum::<f64>();
            samples.push(g);
        }
        let m = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / m;
        let (mut m2, mut m4) = (0.0, 0.0);
        for &g in &samples {
            let d = (g - mean) * (g - mean);
            m2 += d;
            m4 += d * d;
        }
        let var = m2 / (m - 1.0);
        let fourth = m4 / m;
        nu.push(mean);
        psi.push(var);
        psi_se.push(libm::sqrt(((fourth - var * var) / m).max(0.0)));
    }
    Ok(RrtPsi {
        nu,
        psi,
        psi_se,
        exact_upto,
    })
}

/// `Var F(T_n)` through `ψ`, exactly (recursive trees need `n ≤ RRT_EXACT_CAP`).
pub fn exact_var_via_psi(model: Model, f: &dyn TollFunction, n: usize) -> Result<Value> {
    let table = match model {
        Model::Bst => psi_bst(binary_split_toll(f)?, n),
        Model::Rrt => psi_rrt_exact(recursive_split_toll(f)?, n)?,
    };
    var_from_psi(model, &table.psi, n)
}

/// `σ²_F` truncated at `K` for a binary split toll, in `f64`.
pub fn sigma2_via_psi(f: &dyn TollFunction, k_max: usize) -> Result<f64> {
    let g = binary_split_toll(f)?;
    let table = psi_bst(|n, l, r| g(n, l, r).to_f64(), k_max);
    Ok(sigma2_from_psi(Model::Bst, &table.psi))
}

/// Sequence `a_0..=a_N` with `f(n, j, n−1−j) = a_n − a_j − a_{n−1−j}` for all
/// `1 ≤ n ≤ N`, `0 ≤ j < n`, normalized by `a_0 = 0` (the solution is unique
/// up to adding `c(n + 1)`); `None` if no such sequence exists.
pub fn degeneracy_fit_bst(
    f: impl Fn(usize, usize, usize) -> Rational,
    n_max: usize,
) -> Option<Vec<Rational>> {
    let mut a = alloc::vec![<Rational as Zero>::zero(); n_max + 1];
    for n in 1..=n_max {
        a[n] = f(n, 0, n - 1) + &a[0] + &a[n - 1];
        for j in 1..n {
            if f(n, j, n - 1 - j) != &a[n] - &a[j] - &a[n - 1 - j] {
                return None;
            }
        }
    }
    Some(a)
}

/// Recursive analogue: `f(n, (s_j)) = a_n − Σ_j a_{s_j}` over every
/// composition of `n − 1`; `a_0 = 0` is unused and the rest is unique.
pub fn degeneracy_fit_rrt(
    f: impl Fn(usize, &[usize]) -> Rational,
    n_max: usize,
) -> Option<Vec<Rational>> {
    let mut a = alloc::vec![<Rational as Zero>::zero(); n_max + 1];
    for n in 1..=n_max {
        a[n] = if n == 1 {
            f(1, &[])
        } else {
            f(n, &[n - 1]) + &a[n - 1]
        };
        let mut ok = true;
        for_each_principal_composition(n, |parts, _| {
            if ok {
                let rhs = parts.iter().fold(a[n].clone(), |acc, &s| acc - &a[s]);
                ok = f(n, parts) == rhs;
            }
        });
        if !ok {
            return None;
        }
    }
    Some(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::counts::var_count;
    use crate::trees::Toll;

    fn leaves(n: usize, _: usize, _: usize) -> Rational {
        rat((n == 1) as i64, 1)
    }

    #[test]
    fn leaves_table() {
        let t = psi_bst(leaves, 12);
        assert_eq!(t.nu[1], rat(1, 1));
        for k in 2..=12 {
            assert_eq!(t.nu[k], rat(k as i64 + 1, 3));
        }
        assert_eq!(t.psi[1], rat(0, 1));
        assert_eq!(t.psi[2], rat(0, 1));
        assert_eq!(t.psi[3], rat(2, 9));
        for k in 4..=12 {
            assert_eq!(t.psi[k], rat(4, 9 * k as i64));
        }
        for n in 1..=12 {
            assert_eq!(
                var_from_psi(Model::Bst, &t.psi, n).unwrap(),
                var_count(Model::Bst, n, 1)
            );
        }
    }

    #[test]
    fn rrt_composition_law() {
        for k in 1..=9 {
            let mut total = rat(0, 1);
            for_each_principal_composition(k, |_, w| total += w);
            assert_eq!(total, rat(1, 1));
        }
        let t = psi_rrt_exact(|n, _| Value::from_int((n == 1) as i64), 9).unwrap();
        for n in 3..=9 {
            assert_eq!(
                var_from_psi(Model::Rrt, &t.psi, n).unwrap(),
                Value::Exact(rat(n as i64, 12))
            );
        }
        let v = exact_var_via_psi(Model::Rrt, &Toll::SizeIndicator(1), 7).unwrap();
        assert_eq!(v, Value::Exact(var_count(Model::Rrt, 7, 1)));
    }

    #[test]
    fn mc_extension_tracks_exact() {
        let f = |n: usize, _: &[usize]| (n == 1) as u8 as f64;
        let t = psi_rrt_mc(f, 14, 8, 40_000, 5).unwrap();
        let ex = psi_rrt_exact(|n, _| Value::from_int((n == 1) as i64), 14).unwrap();
        for k in 9..=14 {
            let e = ex.psi[k].to_f64();
            assert!(
                (t.psi[k] - e).abs() < 5.0 * t.psi_se[k] + 1e-3,
                "k={k} {} vs {e}",
                t.psi[k]
            );
        }
    }

    #[test]
    fn degeneracy() {
        assert!(degeneracy_fit_bst(leaves, 6).is_none());
        let zero = degeneracy_fit_bst(|_, _, _| rat(0, 1), 6).unwrap();
        assert!(zero.iter().all(num_traits::Zero::is_zero));
        let ones = degeneracy_fit_bst(|_, _, _| rat(1, 1), 8).unwrap();
        let t = psi_bst(|_, _, _| rat(1, 1), 8);
        assert!(t.psi.iter().all(num_traits::Zero::is_zero));
        assert_eq!(ones[3], rat(3, 1));
        let a = [0i64, 3, -1, 4, 1, 5, 9, 2];
        let f = |n: usize, j: usize, r: usize| rat(a[n] - a[j] - a[r], 1);
        assert!(degeneracy_fit_bst(f, 7).is_some());
        assert!(psi_bst(f, 7).psi.iter().all(num_traits::Zero::is_zero));
        let g = |n: usize, s: &[usize]| rat(a[n] - s.iter().map(|&x| a[x]).sum::<i64>(), 1);
        assert!(degeneracy_fit_rrt(g, 7).is_some());
        assert!(degeneracy_fit_rrt(|n, _| rat((n == 1) as i64, 1), 6).is_none());
    }
}
