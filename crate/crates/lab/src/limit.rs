//! The limiting random fringe tree and the shape-entropy partial sums.
//!
//! The limit fringe tree is the size mixture: draw `N` with
//! `P(N >= k) = 2/(k+1)` (binary search tree) or `1/k` (recursive tree),
//! then a uniform tree of that size. `N` is unbounded, so root-local
//! quantities are read from an exact top-down expansion that stops at the
//! depth they need: the left subtree of a binary search tree of size `s` has
//! size uniform on `0..s`, and the subtree of the first child of a recursive
//! tree of size `s` has size uniform on `1..s`, the rest being again a
//! recursive tree.

use fringe_core::random::{random_attachments, random_stamps};
use fringe_core::rng::{SeedSpec, Stream};
use fringe_core::trees::{rrt_from_attachments, AnyTree, BinaryTree};
use fringe_core::Model;
use rayon::prelude::*;

use crate::approx::{sample_statistics, BLOCK};
use crate::oracle::exact_moments;
use crate::LabError;
use fringe_core::stat::Stat;
use fringe_core::trees::Toll;

/// Largest size up to which [`sample_limit_fringe`] materializes the tree.
pub const MATERIALIZE_CAP: u64 = 1 << 20;

/// `N` with `P(N >= k) = 2/(k+1)` resp. `1/k`, by inversion of a uniform on
/// `(0, 1]` with 53-bit resolution.
pub fn sample_limit_size(model: Model, rng: &mut Stream) -> u64 {
    let m = rng.next_u64() >> 11; // uniform on 0..2^53
    match model {
        // V = (m+1)/2^53; N = floor(2/V) − 1
        Model::Bst => (1u64 << 54) / (m + 1) - 1,
        // N = floor(1/V)
        Model::Rrt => (1u64 << 53) / (m + 1),
    }
}

/// Sizes of the root's subtrees (nonempty ones, in order).
fn child_sizes(model: Model, s: u64, rng: &mut Stream, out: &mut Vec<u64>) {
    out.clear();
    match model {
        Model::Bst => {
            let l = rng.below(s);
            let r = s - 1 - l;
            out.extend([l, r].into_iter().filter(|&x| x > 0));
        }
        Model::Rrt => {
            let mut r = s;
            while r > 1 {
                let c = rng.below(r - 1) + 1;
                out.push(c);
                r -= c;
            }
        }
    }
}

/// Whether the root of a uniform tree of size `s` is `l`-protected (no leaf
/// within distance `< l`), expanding only as deep as needed.
fn root_protected_at(model: Model, s: u64, l: usize, rng: &mut Stream) -> bool {
    if l == 0 {
        return true;
    }
    if s == 1 {
        return false;
    }
    let mut kids = Vec::new();
    child_sizes(model, s, rng, &mut kids);
    kids.iter().all(|&c| root_protected_at(model, c, l - 1, rng))
}

/// Draw of the limit fringe tree: its size and, when at most
/// [`MATERIALIZE_CAP`], the tree itself.
pub fn sample_limit_fringe(model: Model, rng: &mut Stream) -> (u64, Option<AnyTree>) {
    let n = sample_limit_size(model, rng);
    if n > MATERIALIZE_CAP {
        return (n, None);
    }
    let n_us = n as usize;
    let tree = match model {
        Model::Bst => {
            let mut stamps = Vec::new();
            random_stamps(rng, n_us, &mut stamps);
            AnyTree::Binary(BinaryTree::from_stamps(&stamps))
        }
        Model::Rrt => {
            let mut parents = Vec::new();
            random_attachments(rng, n_us, &mut parents);
            let p: Vec<usize> = parents.iter().map(|&x| x as usize).collect();
            AnyTree::Ordered(rrt_from_attachments(&p).expect("valid attachments"))
        }
    };
    (n, Some(tree))
}

/// Root-local quantity of the limit fringe tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitStat {
    /// `1{N = k}`.
    SizeIs(u64),
    /// `1{root is l-protected}`.
    RootProtected(usize),
    /// `1{root has d children}`.
    RootDegree(usize),
}

impl std::str::FromStr for LimitStat {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self, LabError> {
        let (name, arg) = s
            .trim()
            .strip_suffix(')')
            .and_then(|t| t.split_once('('))
            .ok_or_else(|| LabError::Invalid(format!("expected name(arg), got `{s}`")))?;
        let v: u64 = arg
            .trim()
            .parse()
            .map_err(|_| LabError::Invalid(format!("bad argument in `{s}`")))?;
        match name {
            "size" => Ok(LimitStat::SizeIs(v)),
            "protected" => Ok(LimitStat::RootProtected(v as usize)),
            "root-degree" => Ok(LimitStat::RootDegree(v as usize)),
            _ => Err(LabError::Invalid(format!("unknown limit statistic `{name}`"))),
        }
    }
}

impl std::fmt::Display for LimitStat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LimitStat::SizeIs(k) => write!(f, "size({k})"),
            LimitStat::RootProtected(l) => write!(f, "protected({l})"),
            LimitStat::RootDegree(d) => write!(f, "root-degree({d})"),
        }
    }
}

fn draw_indicator(model: Model, stat: LimitStat, rng: &mut Stream) -> bool {
    let n = sample_limit_size(model, rng);
    match stat {
        LimitStat::SizeIs(k) => n == k,
        LimitStat::RootProtected(l) => root_protected_at(model, n, l, rng),
        LimitStat::RootDegree(d) => {
            let mut kids = Vec::new();
            child_sizes(model, n, rng, &mut kids);
            kids.len() == d
        }
    }
}

/// Mean and standard error of a limit indicator over `draws` draws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
    pub draws: u64,
}

pub fn limit_fringe_estimate(model: Model, stat: LimitStat, draws: u64, seed: u64) -> Result<Estimate, LabError> {
    if draws == 0 {
        return Err(LabError::Invalid("draws must be positive".into()));
    }
    let spec = SeedSpec::new(seed);
    let hits: u64 = (0..draws.div_ceil(BLOCK))
        .into_par_iter()
        .map(|b| {
            (b * BLOCK..((b + 1) * BLOCK).min(draws))
                .filter(|&r| draw_indicator(model, stat, &mut spec.stream(r)))
                .count() as u64
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    let p = hits as f64 / draws as f64;
    Ok(Estimate {
        mean: p,
        se: (p * (1.0 - p) / draws as f64).sqrt(),
        draws,
    })
}

/// One term of the shape-entropy series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AppendixRow {
    pub m: usize,
    /// `E log(1/p_{m,T_m})` (exact enumeration or Monte Carlo).
    pub entropy: f64,
    pub exact: bool,
    /// `Σ_{j ≤ m} E log(1/p_{j,T_j}) / j²`.
    pub cumulative: f64,
}

/// Sizes up to which the entropy is computed by enumeration.
pub const APPENDIX_EXACT_UPTO: usize = 9;

/// Cumulative sums of `E log(1/p_{m,T_m}) / m²` for binary search trees,
/// `m = 1..=max_m`. Since `p_{m,T} = Π_v 1/|T(v)|`, the entropy is
/// `E Σ_v log |T(v)|`.
pub fn appendix_partial_sums(max_m: usize, reps: u64, seed: u64) -> Result<Vec<AppendixRow>, LabError> {
    if max_m == 0 || max_m > 10_000 {
        return Err(LabError::Invalid("need 1 <= M <= 10000".into()));
    }
    let stat = [Stat::Additive(Toll::LogSize)];
    let mut rows = Vec::with_capacity(max_m);
    let mut cum = 0.0;
    for m in 1..=max_m {
        let (entropy, exact) = if m <= APPENDIX_EXACT_UPTO {
            (exact_moments(Model::Bst, m, &stat[0])?.0.to_f64(), true)
        } else {
            let s = sample_statistics(Model::Bst, m, &stat, reps, fringe_core::rng::mix64(seed.wrapping_add(m as u64)), false)?;
            (s.mean(0), false)
        };
        cum += entropy / (m * m) as f64;
        rows.push(AppendixRow {
            m,
            entropy,
            exact,
            cumulative: cum,
        });
    }
    Ok(rows)
}

/// Least-squares slope of `cumulative(M)` against `ln M` over `points`
/// log-spaced values of `M` in `[m_lo, rows.len()]`.
pub fn appendix_slope(rows: &[AppendixRow], m_lo: usize, points: usize) -> f64 {
    let hi = rows.len() as f64;
    let lo = m_lo.max(1) as f64;
    let mut ms: Vec<usize> = (0..points)
        .map(|i| {
            let t = i as f64 / (points - 1).max(1) as f64;
            (lo * (hi / lo).powf(t)).round() as usize
        })
        .collect();
    ms.dedup();
    let xs: Vec<f64> = ms.iter().map(|&m| (m as f64).ln()).collect();
    let ys: Vec<f64> = ms.iter().map(|&m| rows[m - 1].cumulative).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// `Σ_{k ≤ K} 2 log k / ((k+1)(k+2))`, the per-node entropy constant of
/// the binary search tree truncated at `K`.
pub fn shape_entropy_constant(k_max: usize) -> f64 {
    (2..=k_max)
        .map(|k| {
            let k = k as f64;
            2.0 * k.ln() / ((k + 1.0) * (k + 2.0))
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_law() {
        let spec = SeedSpec::new(1);
        let draws = 200_000;
        for (model, p1) in [(Model::Bst, 1.0 / 3.0), (Model::Rrt, 0.5)] {
            let ones = (0..draws)
                .filter(|&r| sample_limit_size(model, &mut spec.stream(r)) == 1)
                .count() as f64
                / draws as f64;
            let se = (p1 * (1.0 - p1) / draws as f64).sqrt();
            assert!((ones - p1).abs() < 5.0 * se, "{model}: {ones}");
        }
        let e = limit_fringe_estimate(Model::Bst, LimitStat::SizeIs(1), 50_000, 3).unwrap();
        assert!((e.mean - 1.0 / 3.0).abs() < 5.0 * e.se);
    }

    #[test]
    fn materialized_sizes() {
        let spec = SeedSpec::new(5);
        for r in 0..200 {
            let (n, t) = sample_limit_fringe(Model::Rrt, &mut spec.stream(r));
            if let Some(t) = t {
                assert_eq!(t.as_ref().size() as u64, n);
            }
        }
    }

    #[test]
    fn protected_root_two() {
        let e = limit_fringe_estimate(Model::Bst, LimitStat::RootProtected(2), 200_000, 42).unwrap();
        assert!((e.mean - 11.0 / 30.0).abs() < 5.0 * e.se, "{e:?}");
        assert_eq!("protected(3)".parse::<LimitStat>().unwrap(), LimitStat::RootProtected(3));
    }

    #[test]
    fn appendix_small() {
        let rows = appendix_partial_sums(12, 64, 1).unwrap();
        assert_eq!(rows[0].entropy, 0.0);
        let m3 = 4.0 / 6.0 * 6f64.ln() + 1.0 / 3.0 * 3f64.ln();
        assert!((rows[2].entropy - m3).abs() < 1e-12);
        assert!(rows.windows(2).all(|w| w[1].cumulative > w[0].cumulative));
        assert!(rows[8].exact && !rows[9].exact);
    }
}
