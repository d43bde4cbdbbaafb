//! Shape functionals: the probability that the random tree of the same size
//! equals a given tree under a comparison mode.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::rational::Rational;

use super::toll::ordered_shape_term;
use super::{NodeId, OrderedTree, TreeKey, TreeMode, TreeRef};

/// `log P(T)`.
///
/// * Binary: `P(T) = Π_v 1/|T(v)|` (binary search tree law).
/// * Unordered: `P(Λ) = n · Π_v 1/(s(Λ, v)·|Λ(v)|)` (recursive tree law).
/// * Ordered: `P(Λ) = Π_v Π_i 1/(Σ_{j ≥ i} |Λ(v_j)|)`.
pub fn shape_log_prob(t: TreeRef<'_>, mode: TreeMode) -> Result<f64> {
    check(t, mode)?;
    let sizes = t.subtree_sizes();
    let ln = |x: usize| libm::log(x as f64);
    Ok(match (t, mode) {
        (TreeRef::Binary(_), _) => -sizes.iter().map(|&s| ln(s)).sum::<f64>(),
        (TreeRef::Ordered(o), TreeMode::Ordered) => -(0..o.size())
            .map(|v| ordered_shape_term(&child_sizes(o, v, &sizes)))
            .sum::<f64>(),
        (TreeRef::Ordered(o), _) => {
            let mut acc = ln(o.size());
            for (v, &s) in sizes.iter().enumerate() {
                acc -= ln(s);
                for m in multiplicities(o, v) {
                    acc -= (2..=m).map(ln).sum::<f64>();
                }
            }
            acc
        }
    })
}

/// Exact `P(T)` under the same product formulas.
pub fn shape_prob(t: TreeRef<'_>, mode: TreeMode) -> Result<Rational> {
    check(t, mode)?;
    let sizes = t.subtree_sizes();
    let mut denom = BigInt::one();
    let mut numer = BigInt::one();
    match (t, mode) {
        (TreeRef::Binary(_), _) => {
            for &s in &sizes {
                denom *= s;
            }
        }
        (TreeRef::Ordered(o), TreeMode::Ordered) => {
            for v in 0..o.size() {
                let mut suffix = 0usize;
                for s in child_sizes(o, v, &sizes).into_iter().rev() {
                    suffix += s;
                    denom *= suffix;
                }
            }
        }
        (TreeRef::Ordered(o), _) => {
            numer *= o.size();
            for (v, &s) in sizes.iter().enumerate() {
                denom *= s;
                for m in multiplicities(o, v) {
                    for j in 2..=m {
                        denom *= j;
                    }
                }
            }
        }
    }
    Ok(Rational::new(numer, denom))
}

fn check(t: TreeRef<'_>, mode: TreeMode) -> Result<()> {
    if t.supports(mode) {
        Ok(())
    } else {
        Err(Error::ModeMismatch(alloc::format!(
            "{mode} shape of the wrong tree kind"
        )))
    }
}

fn child_sizes(o: &OrderedTree, v: NodeId, sizes: &[usize]) -> Vec<usize> {
    o.children(v).iter().map(|&c| sizes[c]).collect()
}

/// Multiplicities of isomorphism classes among the children of `v`.
fn multiplicities(o: &OrderedTree, v: NodeId) -> Vec<usize> {
    let mut keys: Vec<TreeKey> = o
        .children(v)
        .iter()
        .map(|&c| TreeKey::of_ordered(o, c, TreeMode::Unordered).expect("ordered"))
        .collect();
    keys.sort();
    let mut out = Vec::new();
    let mut i = 0;
    while i < keys.len() {
        let mut j = i;
        while j < keys.len() && keys[j] == keys[i] {
            j += 1;
        }
        out.push(j - i);
        i = j;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::trees::{bst_from_permutation, rrt_from_attachments, BinaryTree};

    #[test]
    fn binary_examples() {
        let one = BinaryTree::leaf();
        assert_eq!(
            shape_log_prob(TreeRef::from(&one), TreeMode::Binary).unwrap(),
            0.0
        );
        let path = bst_from_permutation(&[1, 2, 3]).unwrap();
        let lp = shape_log_prob(TreeRef::from(&path), TreeMode::Binary).unwrap();
        assert!((lp - libm::log(1.0 / 6.0)).abs() < 1e-15);
        assert_eq!(
            shape_prob(TreeRef::from(&path), TreeMode::Binary).unwrap(),
            rat(1, 6)
        );
    }

    #[test]
    fn recursive_examples() {
        let path = rrt_from_attachments(&[1, 2]).unwrap();
        let star = rrt_from_attachments(&[1, 1]).unwrap();
        for t in [&path, &star] {
            for mode in [TreeMode::Unordered, TreeMode::Ordered] {
                assert_eq!(shape_prob(TreeRef::from(t), mode).unwrap(), rat(1, 2));
                let lp = shape_log_prob(TreeRef::from(t), mode).unwrap();
                assert!((lp - libm::log(0.5)).abs() < 1e-15);
            }
        }
        assert!(shape_prob(TreeRef::from(&path), TreeMode::Binary).is_err());
    }
}
