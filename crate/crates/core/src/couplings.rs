//! Size-biasing couplings on stamp circles and their exhaustive check.
//!
//! Given a circle and a target window `i`, the coupling rearranges a few
//! ranks so that the target window holds a fringe subtree, in such a way
//! that a uniform circle is mapped to a circle distributed as the uniform
//! one conditioned on that event. All randomization is an explicit input
//! (`tie_choice`, `ordering_choice`) so verification can enumerate every
//! branch with its exact weight.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::devroye::{indicator_i, indicator_j, window_pattern, StampCircle};
use crate::error::{Error, Result};
use crate::model::Model;
use crate::perm::{factorial, for_each_permutation};
use crate::trees::{BinaryTree, Fringe, Property, TreeRef};

/// Largest circle period accepted by [`verify_conditional_law`].
pub const VERIFY_PERIOD_CAP: usize = 8;

/// Result of one coupling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CouplingOutcome {
    /// Indicator of window `j` on the original circle, at index `j - 1`.
    pub original: Vec<bool>,
    /// Indicator of window `j` on the coupled circle.
    pub coupled: Vec<bool>,
    pub circle: StampCircle,
    /// Positions whose ranks went to `i - 1` and to the right end.
    pub m: i64,
    pub m_prime: i64,
    /// Whether `tie_choice` influenced the result.
    pub tie_used: bool,
    /// Index into the sorted satisfying patterns, for property couplings.
    pub ordering: Option<usize>,
}

fn check_k(model: Model, n: usize, k: usize) -> Result<()> {
    if k == 0 || k + 1 > n {
        return Err(Error::OutOfRange(alloc::format!(
            "{model} coupling needs 1 <= k <= n - 1 (n = {n}, k = {k})"
        )));
    }
    Ok(())
}

fn n_of(model: Model, c: &StampCircle) -> usize {
    match model {
        Model::Bst => c.period() - 1,
        Model::Rrt => c.period(),
    }
}

/// Moves the two smallest ranks of positions `lo..=hi` to `lo` and `hi`.
/// Returns `(m, m′, tie_used)`.
fn pull_two_smallest(c: &mut StampCircle, lo: i64, hi: i64, tie_choice: bool) -> (i64, i64, bool) {
    let mut best = (u32::MAX, lo);
    let mut second = (u32::MAX, lo);
    for pos in lo..=hi {
        let v = c.at(pos);
        if v < best.0 {
            second = best;
            best = (v, pos);
        } else if v < second.0 {
            second = (v, pos);
        }
    }
    let (a, b) = (best.1, second.1);
    let (m, mp, tie) = if a == lo || b == lo {
        (lo, if a == lo { b } else { a }, false)
    } else if a == hi || b == hi {
        (if a == hi { b } else { a }, hi, false)
    } else {
        let (x, y) = if a < b { (a, b) } else { (b, a) };
        if tie_choice {
            (y, x, true)
        } else {
            (x, y, true)
        }
    };
    c.swap(lo, m);
    c.swap(hi, mp);
    (m, mp, tie)
}

fn indicators(model: Model, c: &StampCircle, k: usize) -> Vec<bool> {
    let p = c.period() as i64;
    (1..=p)
        .map(|j| match model {
            Model::Bst => indicator_i(c, j, k),
            Model::Rrt => indicator_j(c, j, k - 1),
        })
        .collect()
}

/// Binary search tree coupling for window `(i, k)` on a circle of period
/// `n + 1`: the two smallest ranks of `i-1..=i+k` are exchanged into the
/// end positions, with `i - 1` (then `i + k`) kept in place when it is one
/// of them and `tie_choice` deciding otherwise.
pub fn couple_binary(
    c: &StampCircle,
    i: i64,
    k: usize,
    tie_choice: bool,
) -> Result<CouplingOutcome> {
    check_k(Model::Bst, n_of(Model::Bst, c), k)?;
    let mut u = c.clone();
    let (m, m_prime, tie_used) = pull_two_smallest(&mut u, i - 1, i + k as i64, tie_choice);
    Ok(CouplingOutcome {
        original: indicators(Model::Bst, c, k),
        coupled: indicators(Model::Bst, &u, k),
        circle: u,
        m,
        m_prime,
        tie_used,
        ordering: None,
    })
}

/// Recursive-tree coupling for `J(i, k-1)` on a circle of period `n`: the
/// binary exchange on `i-1..=i+k-1`, then the two ends are swapped if they
/// are out of order.
pub fn couple_rrt(c: &StampCircle, i: i64, k: usize, tie_choice: bool) -> Result<CouplingOutcome> {
    check_k(Model::Rrt, n_of(Model::Rrt, c), k)?;
    let mut u = c.clone();
    let hi = i + k as i64 - 1;
    let (m, m_prime, tie_used) = pull_two_smallest(&mut u, i - 1, hi, tie_choice);
    if u.at(i - 1) > u.at(hi) {
        u.swap(i - 1, hi);
    }
    Ok(CouplingOutcome {
        original: indicators(Model::Rrt, c, k),
        coupled: indicators(Model::Rrt, &u, k),
        circle: u,
        m,
        m_prime,
        tie_used,
        ordering: None,
    })
}

fn pattern_has(pattern: &[u32], property: &Property) -> Result<bool> {
    let t = BinaryTree::from_stamps(pattern);
    let r = TreeRef::from(&t);
    let sizes = r.subtree_sizes();
    match r.root() {
        Some(root) => property.holds(&Fringe::new(r, root, &sizes)),
        None => Ok(false),
    }
}

/// Rank patterns of length `k` (permutations of `1..=k`, lexicographic)
/// whose tree has the property.
pub fn satisfying_patterns(k: usize, property: &Property) -> Result<Vec<Vec<u32>>> {
    let mut out = Vec::new();
    let mut err = None;
    for_each_permutation(k, |p| {
        let pat: Vec<u32> = p.iter().map(|&x| x + 1).collect();
        match pattern_has(&pat, property) {
            Ok(true) => out.push(pat),
            Ok(false) => {}
            Err(e) => err = Some(e),
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

fn property_indicators(c: &StampCircle, k: usize, property: &Property) -> Result<Vec<bool>> {
    let p = c.period() as i64;
    let mut out = Vec::with_capacity(p as usize);
    for j in 1..=p {
        out.push(indicator_i(c, j, k) && pattern_has(&window_pattern(c, j, k), property)?);
    }
    Ok(out)
}

/// Property coupling: the binary exchange, then the interior ranks of the
/// target window are rearranged into pattern `ordering_choice` of
/// [`satisfying_patterns`]. Indicators are `I · 1{pattern ∈ P}`.
pub fn couple_property(
    c: &StampCircle,
    i: i64,
    k: usize,
    property: &Property,
    tie_choice: bool,
    ordering_choice: usize,
) -> Result<CouplingOutcome> {
    let patterns = satisfying_patterns(k, property)?;
    couple_property_with(c, i, k, property, &patterns, tie_choice, ordering_choice)
}

fn couple_property_with(
    c: &StampCircle,
    i: i64,
    k: usize,
    property: &Property,
    patterns: &[Vec<u32>],
    tie_choice: bool,
    ordering_choice: usize,
) -> Result<CouplingOutcome> {
    check_k(Model::Bst, n_of(Model::Bst, c), k)?;
    if patterns.is_empty() {
        return Err(Error::InvalidInput(alloc::format!(
            "no tree of size {k} has property {property}"
        )));
    }
    let pattern = patterns.get(ordering_choice).ok_or_else(|| {
        Error::OutOfRange(alloc::format!(
            "ordering choice {ordering_choice} of {}",
            patterns.len()
        ))
    })?;
    let mut u = c.clone();
    let (m, m_prime, tie_used) = pull_two_smallest(&mut u, i - 1, i + k as i64, tie_choice);
    let mut vals: Vec<u32> = (0..k as i64).map(|t| u.at(i + t)).collect();
    vals.sort_unstable();
    let mut ranks = u.ranks().to_vec();
    for (t, &r) in pattern.iter().enumerate() {
        ranks[u.index(i + t as i64)] = vals[r as usize - 1];
    }
    let u = StampCircle::new(ranks)?;
    Ok(CouplingOutcome {
        original: property_indicators(c, k, property)?,
        coupled: property_indicators(&u, k, property)?,
        circle: u,
        m,
        m_prime,
        tie_used,
        ordering: Some(ordering_choice),
    })
}

/// Outcome of an exhaustive check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CouplingReport {
    pub model: Model,
    pub n: usize,
    pub k: usize,
    pub i: i64,
    pub property: Option<String>,
    pub circles: u64,
    /// Joint law of the coupled indicators equals the conditional law.
    pub law_match: bool,
    /// The case table held on every input.
    pub case_table_ok: bool,
    /// The target indicator was 1 on every coupled circle.
    pub event_achieved: bool,
    /// Only the permitted positions changed.
    pub exchange_minimal: bool,
    /// Recursive tree at distance exactly `k`: counts of coupled below,
    /// equal to, above the original indicator (weighted by branch).
    pub boundary_frequencies: Option<[u64; 3]>,
}

impl CouplingReport {
    pub fn pass(&self) -> bool {
        self.law_match && self.case_table_ok && self.event_achieved && self.exchange_minimal
    }
}

/// Exhaustively checks the coupling for window `i` over all `p!` circles,
/// every tie branch (weight 1/2) and every satisfying ordering (uniform).
/// Joint laws are compared exactly by cross-multiplied integer counts.
pub fn verify_conditional_law(
    model: Model,
    n: usize,
    k: usize,
    i: i64,
    property: Option<&Property>,
) -> Result<CouplingReport> {
    let p = model.period(n);
    if p > VERIFY_PERIOD_CAP {
        return Err(Error::Capacity(alloc::format!(
            "verification limited to period <= {VERIFY_PERIOD_CAP}"
        )));
    }
    if property.is_some() && model == Model::Rrt {
        return Err(Error::InvalidInput(
            "property couplings are defined for binary search trees".into(),
        ));
    }
    check_k(model, n, k)?;
    let patterns = match property {
        Some(pr) => satisfying_patterns(k, pr)?,
        None => Vec::new(),
    };
    if property.is_some() && patterns.is_empty() {
        return Err(Error::InvalidInput(alloc::format!(
            "property is empty at size {k}"
        )));
    }
    let orderings = patterns.len().max(1);
    let ii = (i - 1).rem_euclid(p as i64) as usize;

    let mut conditional: BTreeMap<Vec<bool>, u64> = BTreeMap::new();
    let mut conditioned = 0u64;
    let mut coupled: BTreeMap<Vec<bool>, u64> = BTreeMap::new();
    let mut case_ok = true;
    let mut achieved = true;
    let mut minimal = true;
    let mut boundary = [0u64; 3];
    let mut err = None;

    for_each_permutation(p, |ranks| {
        if err.is_some() {
            return;
        }
        let c = StampCircle::new(ranks.to_vec()).expect("permutation");
        for tie in [false, true] {
            for ord in 0..orderings {
                let out = match property {
                    None if model == Model::Bst => couple_binary(&c, i, k, tie),
                    None => couple_rrt(&c, i, k, tie),
                    Some(pr) => couple_property_with(&c, i, k, pr, &patterns, tie, ord),
                };
                let out = match out {
                    Ok(o) => o,
                    Err(e) => {
                        err = Some(e);
                        return;
                    }
                };
                if tie && ord == 0 && out.original[ii] {
                    // One entry per circle for the conditional law.
                    *conditional.entry(out.original.clone()).or_default() += 1;
                    conditioned += 1;
                }
                achieved &= out.coupled[ii];
                case_ok &= case_table(model, &c, i, k, &out, &mut boundary);
                minimal &= exchange_minimal(model, &c, i, k, &out, property.is_some());
                *coupled.entry(out.coupled).or_default() += 1;
            }
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    let total = factorial(p).expect("small") as u128 * 2 * orderings as u128;
    let law_match = conditioned > 0
        && conditional.len() == coupled.len()
        && conditional.iter().all(|(v, &cnt)| {
            coupled
                .get(v)
                .is_some_and(|&w| cnt as u128 * total == w as u128 * conditioned as u128)
        });
    Ok(CouplingReport {
        model,
        n,
        k,
        i,
        property: property.map(|p| alloc::format!("{p}")),
        circles: factorial(p).expect("small"),
        law_match,
        case_table_ok: case_ok,
        event_achieved: achieved,
        exchange_minimal: minimal,
        boundary_frequencies: (model == Model::Rrt).then_some(boundary),
    })
}

fn case_table(
    model: Model,
    c: &StampCircle,
    i: i64,
    k: usize,
    out: &CouplingOutcome,
    boundary: &mut [u64; 3],
) -> bool {
    let p = c.period() as i64;
    let k = k as i64;
    let mut ok = true;
    for j in 1..=p {
        let d = c.distance(i, j) as i64;
        let (z, x) = (
            out.coupled[(j - 1) as usize],
            out.original[(j - 1) as usize],
        );
        if d == 0 {
            continue;
        }
        match model {
            Model::Bst => {
                ok &= if d > k + 1 {
                    z == x
                } else if d == k + 1 {
                    z >= x
                } else {
                    !z
                };
            }
            Model::Rrt => {
                if d > k {
                    ok &= z == x;
                } else if d < k {
                    ok &= !z;
                } else {
                    boundary[(z as usize + 1).wrapping_sub(x as usize)] += 1;
                }
            }
        }
    }
    ok
}

fn exchange_minimal(
    model: Model,
    c: &StampCircle,
    i: i64,
    k: usize,
    out: &CouplingOutcome,
    interior: bool,
) -> bool {
    let hi = match model {
        Model::Bst => i + k as i64,
        Model::Rrt => i + k as i64 - 1,
    };
    let allowed = [
        c.index(i - 1),
        c.index(hi),
        c.index(out.m),
        c.index(out.m_prime),
    ];
    (0..c.period()).all(|pos| {
        let in_window = interior && (0..k as i64).any(|t| c.index(i + t) == pos);
        allowed.contains(&pos) || in_window || c.ranks()[pos] == out.circle.ranks()[pos]
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn satisfied_window_is_untouched() {
        let c = StampCircle::new(alloc::vec![0, 3, 4, 1, 2]).unwrap();
        assert!(indicator_i(&c, 1, 2));
        let out = couple_binary(&c, 1, 2, false).unwrap();
        assert_eq!(out.circle, c);
        assert!(!out.tie_used);
    }

    #[test]
    fn forces_a_fringe_on_the_target_keys() {
        // stamps of keys 1..7 with keys 4, 5, 6 not forming a fringe subtree
        let c = StampCircle::from_linear(&[2, 4, 6, 1, 7, 3, 5]);
        assert!(!indicator_i(&c, 4, 3));
        for tie in [false, true] {
            let out = couple_binary(&c, 4, 3, tie).unwrap();
            assert!(indicator_i(&out.circle, 4, 3));
            let t = BinaryTree::from_stamps(&out.circle.rotate_to_min().linear_part());
            let found = (0..t.nodes().len()).any(|v| {
                let f = t.fringe(v).unwrap();
                let keys: Vec<u32> = f
                    .inorder()
                    .iter()
                    .map(|&x| f.node(x).key.unwrap())
                    .collect();
                keys == alloc::vec![4, 5, 6]
            });
            assert!(found);
        }
    }

    #[test]
    fn small_exhaustive_checks() {
        for i in 1..=6 {
            let r = verify_conditional_law(Model::Bst, 5, 2, i, None).unwrap();
            assert!(r.pass(), "{r:?}");
        }
        for i in 1..=6 {
            let r = verify_conditional_law(Model::Rrt, 6, 1, i, None).unwrap();
            assert!(r.pass(), "{r:?}");
        }
        let cherry = Property::Cherry;
        assert_eq!(
            satisfying_patterns(3, &cherry).unwrap(),
            alloc::vec![alloc::vec![2, 1, 3], alloc::vec![3, 1, 2]]
        );
        let r = verify_conditional_law(Model::Bst, 5, 3, 2, Some(&cherry)).unwrap();
        assert!(r.pass(), "{r:?}");
        assert!(verify_conditional_law(Model::Bst, 9, 2, 1, None).is_err());
        assert!(couple_binary(
            &StampCircle::new(alloc::vec![0, 1, 2]).unwrap(),
            1,
            2,
            false
        )
        .is_err());
    }
}
