//! Covariance coefficients `γ*` (binary search tree) and `γ̂*` (recursive
//! tree) with explicit, total case selection, plus the size weights
//! `π_{k,n}` / `π̂_{k,n}`.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::model::Model;
use crate::rational::Rational;

pub(crate) fn big(x: usize) -> BigInt {
    BigInt::from(x)
}

/// `Π num / Π den` over small integer factors, without overflow.
pub(crate) fn frac(num: &[usize], den: &[usize]) -> Rational {
    let n = num.iter().fold(BigInt::from(1), |a, &x| a * big(x));
    let d = den.iter().fold(BigInt::from(1), |a, &x| a * big(x));
    Rational::new(n, d)
}

/// The factor in front of every mean and covariance: `n + 1` or `n`.
pub fn normalizer(model: Model, n: usize) -> Rational {
    Rational::from_integer(big(model.period(n)))
}

/// `π_{k,n}`: `2/((k+1)(k+2))` for `k < n`, `1/(n+1)` at `k = n`, else 0.
/// Recursive tree: `1/(k(k+1))`, `1/n`, 0.
pub fn pi_kn(model: Model, n: usize, k: usize) -> Rational {
    if k == 0 || k > n {
        return Rational::zero();
    }
    match (model, k == n) {
        (Model::Bst, false) => frac(&[2], &[k + 1, k + 2]),
        (Model::Bst, true) => frac(&[1], &[n + 1]),
        (Model::Rrt, false) => frac(&[1], &[k, k + 1]),
        (Model::Rrt, true) => frac(&[1], &[n]),
    }
}

/// Limit weight `π_k = lim_n π_{k,n}`.
pub fn pi_limit(model: Model, k: usize) -> Rational {
    pi_kn(model, k + 1, k)
}

/// Generic `γ(k, m)` for `n > k + m + 1`.
pub fn gamma(k: usize, m: usize) -> Rational {
    let s = k + m;
    frac(&[4, s + 3], &[k + 1, k + 2, m + 1, m + 2])
        - frac(
            &[4, k * k + 3 * k * m + m * m + 4 * k + 4 * m + 3],
            &[k + 1, m + 1, s + 1, s + 2, s + 3],
        )
}

/// `γ₁` for `n = k + m + 1`.
pub fn gamma1(n: usize, k: usize, m: usize) -> Rational {
    frac(&[4, k + m + 2], &[k + 1, k + 2, m + 1, m + 2]) - frac(&[2], &[n, n + 1])
}

/// `γ₂` for `max(k, m) < n < k + m + 1`.
pub fn gamma2(n: usize, k: usize, m: usize) -> Rational {
    frac(&[4, n + 1], &[k + 1, k + 2, m + 1, m + 2])
}

/// `γ₃(k, m)` for `n = k ≥ m`.
pub fn gamma3(k: usize, m: usize) -> Rational {
    if m < k {
        frac(&[2], &[m + 1, m + 2])
    } else {
        frac(&[1], &[k + 1])
    }
}

/// Case-selected `γ*(k, m)` at size `n`; symmetric; 0 once a size exceeds
/// `n`.
pub fn gamma_coeffs(n: usize, k: usize, m: usize) -> Rational {
    let (k, m) = (k.max(m), k.min(m));
    if m == 0 || k > n {
        Rational::zero()
    } else if k == n {
        gamma3(k, m)
    } else if k + m + 1 < n {
        gamma(k, m)
    } else if k + m + 1 == n {
        gamma1(n, k, m)
    } else {
        gamma2(n, k, m)
    }
}

/// Generic `γ̂(k, m)` for `n > k + m`.
pub fn hat_gamma(k: usize, m: usize) -> Rational {
    frac(
        &[k * k + k * m + m * m + k + m],
        &[k, k + 1, m, m + 1, k + m + 1],
    )
}

/// `γ̂₂` for `max(k, m) < n ≤ k + m`.
pub fn hat_gamma2(n: usize, k: usize, m: usize) -> Rational {
    frac(&[n], &[k, k + 1, m, m + 1])
}

/// `γ̂₃(k, m)` for `n = k ≥ m`.
pub fn hat_gamma3(k: usize, m: usize) -> Rational {
    if m < k {
        frac(&[1], &[m, m + 1])
    } else {
        frac(&[1], &[k])
    }
}

/// Case-selected `γ̂*(k, m)` at size `n`.
pub fn hat_gamma_coeffs(n: usize, k: usize, m: usize) -> Rational {
    let (k, m) = (k.max(m), k.min(m));
    if m == 0 || k > n {
        Rational::zero()
    } else if k == n {
        hat_gamma3(k, m)
    } else if k + m < n {
        hat_gamma(k, m)
    } else {
        hat_gamma2(n, k, m)
    }
}

pub fn gamma_star(model: Model, n: usize, k: usize, m: usize) -> Rational {
    match model {
        Model::Bst => gamma_coeffs(n, k, m),
        Model::Rrt => hat_gamma_coeffs(n, k, m),
    }
}

/// Limit coefficient (`n → ∞`).
pub fn gamma_limit(model: Model, k: usize, m: usize) -> Rational {
    match model {
        Model::Bst => gamma(k, m),
        Model::Rrt => hat_gamma(k, m),
    }
}
