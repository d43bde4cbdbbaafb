//! Monte Carlo estimates and limit-law distances.
//!
//! Replicate `r` draws from stream `r` of the master seed. Replicates are
//! processed in fixed blocks of [`BLOCK`]; blocks run on the rayon pool and
//! are merged in block order, so results are bit-identical for any number
//! of workers.

use std::collections::BTreeMap;

use fringe_core::rng::SeedSpec;
use fringe_core::stat::{Stat, TreeSampler};
use fringe_core::Model;
use rayon::prelude::*;

use crate::oracle::tv_to_poisson;
use crate::LabError;

/// Replicates per work item.
pub const BLOCK: u64 = 1024;

/// Sums, cross products and (for integer statistics) empirical pmfs.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleStats {
    pub model: Model,
    pub n: usize,
    pub seed: u64,
    pub reps: u64,
    pub names: Vec<String>,
    integer: Vec<bool>,
    // integer statistics: exact sums
    isum: Vec<i128>,
    icross: Vec<i128>,
    // any pair involving a real statistic
    fsum: Vec<f64>,
    fcross: Vec<f64>,
    pmf: Vec<BTreeMap<i64, u64>>,
    /// Raw values per statistic in replicate order, when requested.
    pub samples: Option<Vec<Vec<f64>>>,
}

impl SampleStats {
    fn empty(model: Model, n: usize, seed: u64, stats: &[Stat], keep: bool) -> Self {
        let d = stats.len();
        SampleStats {
            model,
            n,
            seed,
            reps: 0,
            names: stats.iter().map(|s| s.to_string()).collect(),
            integer: stats.iter().map(Stat::is_integer).collect(),
            isum: vec![0; d],
            icross: vec![0; d * d],
            fsum: vec![0.0; d],
            fcross: vec![0.0; d * d],
            pmf: vec![BTreeMap::new(); d],
            samples: keep.then(|| vec![Vec::new(); d]),
        }
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    fn both_int(&self, i: usize, j: usize) -> bool {
        self.integer[i] && self.integer[j]
    }

    fn push(&mut self, x: &[f64]) {
        let d = self.dim();
        self.reps += 1;
        for i in 0..d {
            if self.integer[i] {
                let v = x[i] as i64;
                self.isum[i] += v as i128;
                *self.pmf[i].entry(v).or_insert(0) += 1;
            } else {
                self.fsum[i] += x[i];
            }
            for j in i..d {
                if self.both_int(i, j) {
                    self.icross[i * d + j] += x[i] as i128 * x[j] as i128;
                } else {
                    self.fcross[i * d + j] += x[i] * x[j];
                }
            }
            if let Some(s) = &mut self.samples {
                s[i].push(x[i]);
            }
        }
    }

    /// Appends the replicates of `other` (which must follow `self`).
    pub fn merge(&mut self, other: &SampleStats) -> Result<(), LabError> {
        if self.names != other.names || self.model != other.model || self.n != other.n {
            return Err(LabError::Invalid("merging samples of different experiments".into()));
        }
        self.reps += other.reps;
        for i in 0..self.dim() {
            self.isum[i] += other.isum[i];
            self.fsum[i] += other.fsum[i];
            for (v, c) in &other.pmf[i] {
                *self.pmf[i].entry(*v).or_insert(0) += c;
            }
        }
        for i in 0..self.icross.len() {
            self.icross[i] += other.icross[i];
            self.fcross[i] += other.fcross[i];
        }
        if let (Some(a), Some(b)) = (&mut self.samples, &other.samples) {
            for (x, y) in a.iter_mut().zip(b) {
                x.extend_from_slice(y);
            }
        }
        Ok(())
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn mean(&self, i: usize) -> f64 {
        let s = if self.integer[i] { self.isum[i] as f64 } else { self.fsum[i] };
        s / self.reps as f64
    }

    /// Unbiased sample covariance.
    pub fn cov(&self, i: usize, j: usize) -> f64 {
        let (i, j) = (i.min(j), i.max(j));
        let d = self.dim();
        let r = self.reps as f64;
        if self.reps < 2 {
            return 0.0;
        }
        if self.both_int(i, j) {
            // R Σxy − Σx Σy exactly, then scale
            let num = self.reps as i128 * self.icross[i * d + j] - self.isum[i] * self.isum[j];
            num as f64 / (r * (r - 1.0))
        } else {
            let sx = if self.integer[i] { self.isum[i] as f64 } else { self.fsum[i] };
            let sy = if self.integer[j] { self.isum[j] as f64 } else { self.fsum[j] };
            (self.fcross[i * d + j] - sx * sy / r) / (r - 1.0)
        }
    }

    pub fn var(&self, i: usize) -> f64 {
        self.cov(i, i)
    }

    /// Standard error of the mean.
    pub fn se(&self, i: usize) -> f64 {
        (self.var(i) / self.reps as f64).sqrt()
    }

    /// Empirical pmf `(value, mass)` of an integer statistic.
    pub fn pmf(&self, i: usize) -> Option<Vec<(i64, f64)>> {
        self.integer[i].then(|| {
            let r = self.reps as f64;
            self.pmf[i].iter().map(|(&v, &c)| (v, c as f64 / r)).collect()
        })
    }

    pub fn pmf_counts(&self, i: usize) -> &BTreeMap<i64, u64> {
        &self.pmf[i]
    }
}

/// Draws `reps` trees of size `n` and records the statistics.
pub fn sample_statistics(
    model: Model,
    n: usize,
    stats: &[Stat],
    reps: u64,
    seed: u64,
    keep_samples: bool,
) -> Result<SampleStats, LabError> {
    if n == 0 || reps == 0 {
        return Err(LabError::Invalid("need n >= 1 and reps >= 1".into()));
    }
    let spec = SeedSpec::new(seed);
    let blocks = reps.div_ceil(BLOCK);
    let parts: Vec<Result<SampleStats, LabError>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut out = SampleStats::empty(model, n, seed, stats, keep_samples);
            let mut sampler = TreeSampler::new();
            let mut x = Vec::with_capacity(stats.len());
            for r in b * BLOCK..((b + 1) * BLOCK).min(reps) {
                let mut rng = spec.stream(r);
                sampler.sample(model, n, stats, &mut rng, &mut x)?;
                out.push(&x);
            }
            Ok(out)
        })
        .collect();
    let mut total = SampleStats::empty(model, n, seed, stats, keep_samples);
    for p in parts {
        total.merge(&p?)?;
    }
    Ok(total)
}

/// Empirical total variation distance to `Po(λ)` and the conservative
/// half-width `√|support| / (2√reps)`.
pub fn tv_empirical_to_poisson(s: &SampleStats, i: usize, lambda: f64) -> Result<(f64, f64), LabError> {
    let pmf = s
        .pmf(i)
        .ok_or_else(|| LabError::Invalid(format!("{} is not integer valued", s.names[i])))?;
    if pmf.iter().any(|&(v, _)| v < 0) {
        return Err(LabError::Invalid("negative values in a count".into()));
    }
    let pmf: Vec<(u64, f64)> = pmf.into_iter().map(|(v, p)| (v as u64, p)).collect();
    let hw = (pmf.len() as f64).sqrt() / (2.0 * (s.reps as f64).sqrt());
    Ok((tv_to_poisson(&pmf, lambda), hw))
}

/// Standard normal distribution function, `Φ(z) = erfc(−z/√2)/2`.
pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// Kolmogorov distance between an empirical law (atoms with masses, sorted
/// by value) and `Φ`; checked on both sides of every jump.
pub fn ks_atoms(atoms: &[(f64, f64)]) -> f64 {
    let mut cdf = 0.0;
    let mut d: f64 = 0.0;
    for &(z, m) in atoms {
        let phi = std_normal_cdf(z);
        d = d.max((phi - cdf).abs());
        cdf += m;
        d = d.max((cdf - phi).abs());
    }
    d
}

/// KS distance of `(X − center)/scale` to the standard normal.
pub fn ks_to_normal(s: &SampleStats, i: usize, center: f64, scale: f64) -> Result<f64, LabError> {
    if !(scale > 0.0) {
        return Err(LabError::Invalid("scale must be positive".into()));
    }
    let atoms: Vec<(f64, f64)> = match s.pmf(i) {
        Some(p) => p.into_iter().map(|(v, m)| ((v as f64 - center) / scale, m)).collect(),
        None => {
            let xs = s
                .samples
                .as_ref()
                .ok_or_else(|| LabError::Invalid("real statistic needs kept samples".into()))?;
            let mut z: Vec<f64> = xs[i].iter().map(|x| (x - center) / scale).collect();
            z.sort_by(f64::total_cmp);
            let w = 1.0 / z.len() as f64;
            z.into_iter().map(|v| (v, w)).collect()
        }
    };
    Ok(ks_atoms(&atoms))
}

/// Unbiased covariance matrix of all statistics.
pub fn empirical_cov_matrix(s: &SampleStats) -> Vec<Vec<f64>> {
    let d = s.dim();
    (0..d).map(|i| (0..d).map(|j| s.cov(i, j)).collect()).collect()
}

/// Largest `|C_ij / norm − σ_ij| / |σ_ij|` over entries with `|σ_ij| > 1e−4`.
pub fn compare_to_gamma(cov: &[Vec<f64>], slopes: &[Vec<f64>], norm: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for (row, srow) in cov.iter().zip(slopes) {
        for (&c, &s) in row.iter().zip(srow) {
            if s.abs() > 1e-4 {
                worst = worst.max((c / norm - s).abs() / s.abs());
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_tree() {
        let s = sample_statistics(Model::Bst, 1, &[Stat::Count(1)], 1, 0, false).unwrap();
        assert_eq!(s.mean(0), 1.0);
        assert_eq!(s.pmf(0).unwrap(), vec![(1, 1.0)]);
    }

    #[test]
    fn deterministic_and_mergeable() {
        let stats = [Stat::Count(1), Stat::Count(2)];
        let a = sample_statistics(Model::Rrt, 30, &stats, 3000, 9, false).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| sample_statistics(Model::Rrt, 30, &stats, 3000, 9, false).unwrap());
        assert_eq!(a, b);
        // two runs of 1024 + 1024 merged equal one run over 2048 with the
        // same streams
        let whole = sample_statistics(Model::Bst, 12, &stats, 2048, 4, true).unwrap();
        let mut first = sample_statistics(Model::Bst, 12, &stats, 1024, 4, true).unwrap();
        let mut second = SampleStats::empty(Model::Bst, 12, 4, &stats, true);
        let mut sampler = TreeSampler::new();
        let mut x = Vec::new();
        for r in 1024..2048 {
            sampler.sample(Model::Bst, 12, &stats, &mut SeedSpec::new(4).stream(r), &mut x).unwrap();
            second.push(&x);
        }
        first.merge(&second).unwrap();
        assert_eq!(first, whole);
        let total: f64 = whole.pmf(0).unwrap().iter().map(|p| p.1).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn leaves_mean() {
        let n = 10_000;
        let s = sample_statistics(Model::Bst, n, &[Stat::Count(1)], 400, 42, false).unwrap();
        let target = 2.0 * (n as f64 + 1.0) / 6.0;
        assert!((s.mean(0) - target).abs() < 5.0 * s.se(0));
    }

    #[test]
    fn ks_self_test() {
        // quantile grid of the normal itself
        let m = 2000;
        let atoms: Vec<(f64, f64)> = (0..m)
            .map(|i| {
                let p = (i as f64 + 0.5) / m as f64;
                (inverse_phi(p), 1.0 / m as f64)
            })
            .collect();
        assert!(ks_atoms(&atoms) <= 1.0 / m as f64 + 1e-9);
        assert!((std_normal_cdf(0.0) - 0.5).abs() < 1e-16);
        assert!((std_normal_cdf(1.959963984540054) - 0.975).abs() < 1e-12);
    }

    fn inverse_phi(p: f64) -> f64 {
        let (mut lo, mut hi) = (-10.0, 10.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if std_normal_cdf(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn tv_and_cov() {
        let s = sample_statistics(Model::Bst, 1, &[Stat::Count(1)], 10, 1, false).unwrap();
        let (tv, _) = tv_empirical_to_poisson(&s, 0, 1.0).unwrap();
        assert!((tv - (1.0 - (-1.0f64).exp())).abs() < 1e-12);
        let c = vec![vec![2.0, 1.0], vec![1.0, 4.0]];
        let g = vec![vec![1.0, 0.5], vec![0.5, 2.5]];
        assert!((compare_to_gamma(&c, &g, 2.0) - 0.2).abs() < 1e-12);
    }
}
