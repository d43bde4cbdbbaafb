//! Means, variances and covariances of subtree counts, with every boundary
//! case of `n` relative to the sizes involved.

use num_traits::{One, Signed, Zero};

use crate::error::{invalid, Result};
use crate::model::Model;
use crate::rational::Rational;
use crate::trees::TreeKey;

use super::gamma::{frac, gamma_limit, gamma_star, normalizer, pi_kn, pi_limit};

/// `E X_{n,k}`: `2(n+1)/((k+1)(k+2))` resp. `n/(k(k+1))` for `k < n`; 1 at
/// `k = n`; 0 beyond.
pub fn mean_count(model: Model, n: usize, k: usize) -> Rational {
    normalizer(model, n) * pi_kn(model, n, k)
}

/// `E X^P_{n,k} = p · E X_{n,k}` where `p = p_{k,P}`.
pub fn mean_count_property(model: Model, n: usize, k: usize, p: &Rational) -> Rational {
    mean_count(model, n, k) * p
}

/// `Var X_{n,k}`.
pub fn var_count(model: Model, n: usize, k: usize) -> Rational {
    var_count_property(model, n, k, &Rational::one())
}

/// `Var X^P_{n,k}`. The windows of two disjoint copies contribute
/// `p²·E(I I′)`; the branch depends on whether two copies fit with room to
/// spare, fit exactly (binary search tree, `n = 2k + 1`), or cannot both
/// occur.
pub fn var_count_property(model: Model, n: usize, k: usize, p: &Rational) -> Rational {
    if k == 0 || k > n {
        return Rational::zero();
    }
    let p2 = p * p;
    if k == n {
        return p - &p2;
    }
    let mu = mean_count(model, n, k);
    let mup = &mu * p;
    match model {
        Model::Bst => {
            if 2 * k + 1 < n {
                mup - p2
                    * frac(
                        &[n + 1, 22 * k * k + 44 * k + 12],
                        &[k + 1, k + 2, k + 2, 2 * k + 1, 2 * k + 3],
                    )
            } else if 2 * k + 1 == n {
                mup + p2 * (frac(&[2], &[n]) - frac(&[64], &[n + 3, n + 3]))
            } else {
                mup - &mu * &mu * p2
            }
        }
        Model::Rrt => {
            if 2 * k < n {
                mup - p2 * frac(&[n, 3 * k + 2], &[k, k + 1, k + 1, 2 * k + 1])
            } else {
                mup - &mu * &mu * p2
            }
        }
    }
}

/// Covariance of `F = Σ f(T(v))` and `G = Σ g(T(v))` where `f` lives on
/// size `k`, `g` on size `m ≤ k`. `e_fg = E f(T_k) G(T_k)`, `mu_f`, `mu_g`
/// the means of `f(T_k)` and `g(T_m)`.
pub fn cov_sized(
    model: Model,
    n: usize,
    k: usize,
    m: usize,
    e_fg: &Rational,
    mu_f: &Rational,
    mu_g: &Rational,
) -> Result<Rational> {
    if m > k || m == 0 {
        return Err(invalid(alloc::format!(
            "need 1 <= m <= k, got k={k}, m={m}"
        )));
    }
    if n < k {
        return Ok(Rational::zero());
    }
    let g = gamma_star(model, n, k, m);
    let norm = normalizer(model, n);
    Ok(norm * (pi_kn(model, n, k) * e_fg - g * mu_f * mu_g))
}

/// `Cov(X_{n,k}, X_{n,m})`, symmetric in `k, m`.
pub fn cov_size_counts(model: Model, n: usize, k: usize, m: usize) -> Rational {
    let (k, m) = (k.max(m), k.min(m));
    if m == 0 {
        return Rational::zero();
    }
    let one = Rational::one();
    // E[1 · X_{k,m}(T_k)] = E X_{k,m}
    cov_sized(model, n, k, m, &mean_count(model, k, m), &one, &one).expect("ordered sizes")
}

/// `Cov(X^T_n, X^{T′}_n)` with `|T′| ≤ |T|`, `p_t = p_{|T|,T}`,
/// `p_t2 = p_{|T′|,T′}` and `q` the number of copies of `T′` in `T`.
pub fn cov_tree_counts(
    model: Model,
    n: usize,
    t: &TreeKey,
    t2: &TreeKey,
    p_t: &Rational,
    p_t2: &Rational,
    q: usize,
) -> Result<Rational> {
    let (k, m) = (t.size(), t2.size());
    if m > k {
        return Err(invalid(alloc::format!(
            "second tree larger than the first ({m} > {k})"
        )));
    }
    if m == 0 {
        return Err(invalid("empty tree"));
    }
    let e_fg = p_t * Rational::from_integer(q.into());
    cov_sized(model, n, k, m, &e_fg, p_t, p_t2)
}

/// Limit slope `σ_{T,T′} = π_k q p_T − γ(k,m) p_T p_{T′}` for `|T| = k ≥ m = |T′|`.
pub fn sigma_tree(
    model: Model,
    k: usize,
    m: usize,
    p_t: &Rational,
    p_t2: &Rational,
    q: usize,
) -> Rational {
    let q = Rational::from_integer(q.into());
    pi_limit(model, k) * q * p_t - gamma_limit(model, k, m) * p_t * p_t2
}

/// Limit slope `σ_{k,m} = lim Cov(X_{n,k}, X_{n,m}) / n`, from the
/// closed forms.
pub fn sigma_size(model: Model, k: usize, m: usize) -> Rational {
    let (k, m) = (k.max(m), k.min(m));
    match (model, k == m) {
        (Model::Bst, false) => -frac(
            &[4, m, 2 * k + m + 3],
            &[k + 1, k + 2, k + m + 1, k + m + 2, k + m + 3],
        ),
        (Model::Bst, true) => frac(
            &[2, k, 4 * k * k + 5 * k - 3],
            &[k + 1, k + 2, k + 2, 2 * k + 1, 2 * k + 3],
        ),
        (Model::Rrt, false) => -frac(&[1], &[k, k + 1, k + m + 1]),
        (Model::Rrt, true) => frac(&[2 * k * k - 1], &[k, k + 1, k + 1, 2 * k + 1]),
    }
}

/// `E(I_{1,k} I_{k+2,k})` (binary search tree) or `E(J_{1,k-1} J_{k+1,k-1})`
/// (recursive tree) for adjacent windows; 0 when two windows cannot be
/// adjacent at period `model.period(n)`.
pub fn adjacent_pair_expectation(model: Model, n: usize, k: usize) -> Rational {
    match model {
        Model::Bst if 2 * k + 1 < n => frac(&[5 * k + 3], &[k + 1, k + 1, 2 * k + 1, 2 * k + 3]),
        Model::Bst if 2 * k + 1 == n => frac(&[2], &[n, n + 1]),
        Model::Rrt if 2 * k < n => frac(&[1], &[2, k, k, 2 * k + 1]),
        _ => Rational::zero(),
    }
}

/// Right-hand side of the Stein–Chen bound for `d_TV(L(X^P_{n,k}), Po(μ))`:
/// `(1 ∧ μ⁻¹)(μ − Var + 2 Σ_α Σ_{β neutral} E I_α I_β)`. The neutral
/// neighbours are the windows at distance `k + 1` (binary search tree) or
/// `k` (recursive tree); there are two of them, or one when both directions
/// coincide on the circle.
pub fn stein_bound_rhs(model: Model, n: usize, k: usize, p: &Rational) -> Result<Rational> {
    if k == 0 || k >= n {
        return Err(invalid(alloc::format!("need 1 <= k < n, got n={n}, k={k}")));
    }
    let mu = mean_count_property(model, n, k, p);
    let var = var_count_property(model, n, k, p);
    let period = model.period(n);
    let gap = match model {
        Model::Bst => k + 1,
        Model::Rrt => k,
    };
    let neighbours = if 2 * gap < period {
        2
    } else if 2 * gap == period {
        1
    } else {
        0
    };
    let pair = adjacent_pair_expectation(model, n, k) * p * p;
    let inner = &mu - var + frac(&[2 * neighbours, period], &[1]) * pair;
    let factor = if mu > Rational::one() {
        mu.recip()
    } else {
        Rational::one()
    };
    let out = factor * inner;
    debug_assert!(!out.is_negative());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn means() {
        assert_eq!(mean_count(Model::Bst, 10, 1), rat(11, 3));
        assert_eq!(mean_count(Model::Rrt, 12, 3), rat(1, 1));
        assert_eq!(mean_count(Model::Bst, 4, 4), rat(1, 1));
        assert_eq!(mean_count(Model::Rrt, 4, 5), rat(0, 1));
        assert_eq!(
            mean_count_property(Model::Bst, 10, 3, &rat(1, 3)),
            rat(11, 30)
        );
    }

    #[test]
    fn variances() {
        assert_eq!(var_count(Model::Bst, 10, 1), rat(22, 45));
        assert_eq!(var_count(Model::Bst, 5, 2), rat(2, 5));
        assert_eq!(var_count(Model::Rrt, 9, 1), rat(3, 4));
        assert_eq!(var_count_property(Model::Bst, 9, 3, &rat(0, 1)), rat(0, 1));
        assert_eq!(var_count(Model::Bst, 1, 1), rat(0, 1));
    }

    #[test]
    fn covariances() {
        for n in 6..12 {
            assert_eq!(
                cov_size_counts(Model::Bst, n, 2, 1),
                rat(-(n as i64 + 1), 45)
            );
        }
        for n in 4..12 {
            assert_eq!(cov_size_counts(Model::Rrt, n, 2, 1), rat(-(n as i64), 24));
        }
        for n in 1..10 {
            for k in 1..=n {
                assert_eq!(
                    cov_size_counts(Model::Bst, n, k, k),
                    var_count(Model::Bst, n, k)
                );
                assert_eq!(
                    cov_size_counts(Model::Rrt, n, k, k),
                    var_count(Model::Rrt, n, k)
                );
            }
        }
    }

    #[test]
    fn slopes() {
        let third = rat(1, 3);
        let one = rat(1, 1);
        assert_eq!(sigma_tree(Model::Bst, 1, 1, &one, &one, 1), rat(2, 45));
        assert_eq!(sigma_tree(Model::Bst, 3, 1, &third, &one, 2), rat(2, 105));
        assert_eq!(
            sigma_tree(Model::Bst, 3, 3, &third, &third, 1),
            rat(43, 1575)
        );
        assert_eq!(sigma_size(Model::Rrt, 1, 1), rat(1, 12));
        assert_eq!(sigma_size(Model::Rrt, 2, 1), rat(-1, 24));
        assert_eq!(sigma_size(Model::Rrt, 2, 2), rat(7, 90));
        assert_eq!(sigma_size(Model::Bst, 2, 1), rat(-1, 45));
        // closed-form slopes agree with the generic slope for size counts
        for model in [Model::Bst, Model::Rrt] {
            for k in 1..8 {
                for m in 1..=k {
                    let q = mean_count(model, k, m);
                    let generic = pi_limit(model, k) * q - gamma_limit(model, k, m);
                    assert_eq!(generic, sigma_size(model, k, m), "{model} {k} {m}");
                }
            }
        }
    }

    #[test]
    fn stein_inputs() {
        assert_eq!(adjacent_pair_expectation(Model::Bst, 10, 1), rat(2, 15));
        assert_eq!(adjacent_pair_expectation(Model::Rrt, 10, 1), rat(1, 6));
        assert_eq!(adjacent_pair_expectation(Model::Bst, 7, 3), rat(1, 28));
        for n in 2..30 {
            for k in 1..n {
                for model in [Model::Bst, Model::Rrt] {
                    assert!(!stein_bound_rhs(model, n, k, &rat(1, 1))
                        .unwrap()
                        .is_negative());
                }
            }
        }
    }
}
