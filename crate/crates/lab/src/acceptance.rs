//! The acceptance suite. Each criterion is a list of checked rows; a
//! criterion passes when none of its rows fails.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use fringe_core::couplings::verify_conditional_law;
use fringe_core::devroye::{eval_cyclic_bst, eval_cyclic_rrt, eval_linear_bst, eval_linear_rrt, StampCircle};
use fringe_core::exact::{
    cov_size_counts, cov_tree_counts, degeneracy_fit_bst, degeneracy_fit_rrt, exact_var_via_psi, mean_count, mean_f,
    psi_bst, psi_rrt_exact, sigma_size, stein_bound_rhs, toll_moments, var_count, var_f,
};
use fringe_core::random::random_stamps;
use fringe_core::rational::{fmt_rational, fmt_real, is_positive_definite, to_f64};
use fringe_core::rng::SeedSpec;
use fringe_core::stat::Stat;
use fringe_core::trees::{
    additive_functional, all_binary_trees, all_unordered_keys, count_matching, rotation_to_ordered,
    rrt_from_attachments, BinaryTree, Property, Toll, TreeKey, TreeMode, TreeRef,
};
use fringe_core::{rat, Model, Rational, Value};
use num_traits::{One, Zero};

use crate::approx::{compare_to_gamma, empirical_cov_matrix, ks_to_normal, sample_statistics, tv_empirical_to_poisson};
use crate::classes::{class_cov, class_mean, class_prob, class_slope, class_var, fringe_class};
use crate::limit::{appendix_partial_sums, appendix_slope, limit_fringe_estimate, shape_entropy_constant, LimitStat};
use crate::oracle::{enumerate_model, enumerate_stamp_circles, exact_law, exact_moments, exact_moments_table};
use crate::report::{Row, Verdict};
use crate::LabError;

pub const CRITERIA: [&str; 11] = [
    "closed-form moments and covariances equal exhaustive enumeration for n <= 9",
    "protected-node moments agree across enumeration, toll moments and the psi recursion",
    "psi recursion of the leaf toll and degeneracy witnesses",
    "coupled indicators have the conditional law on every stamp circle",
    "cyclic and linear stamp representations agree",
    "exact Poisson distance stays within the Stein bound",
    "Poisson distance decreases in k at n = 20000",
    "standardized counts are within KS 0.03 of the normal law",
    "covariance slopes match and the limit matrices are positive definite",
    "outdegrees, protected roots and the shape functional at scale",
    "shape-entropy partial sums grow at the per-node entropy rate",
];

/// Outcome of one criterion.
#[derive(Debug, Clone)]
pub struct Criterion {
    pub id: usize,
    pub title: &'static str,
    pub rows: Vec<Row>,
    pub elapsed: Duration,
}

impl Criterion {
    pub fn passed(&self) -> bool {
        !self.rows.is_empty() && self.rows.iter().all(|r| r.verdict != Verdict::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| r.verdict == Verdict::Fail)
    }

    /// `PASS criterion N: title (checks, seconds)`.
    pub fn summary(&self) -> String {
        let checks = self.rows.iter().filter(|r| r.verdict != Verdict::Info).count();
        format!(
            "{} criterion {}: {} ({} checks, {:.1}s)",
            if self.passed() { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            checks,
            self.elapsed.as_secs_f64()
        )
    }
}

/// Runs criterion `id` (1-based). Errors become a failing row.
pub fn run_criterion(id: usize, seed: u64) -> Criterion {
    let start = Instant::now();
    let title = CRITERIA.get(id.wrapping_sub(1)).copied().unwrap_or("unknown criterion");
    let result = match id {
        1 => exact_vs_oracle(),
        2 => protected_three_ways(),
        3 => psi_closed_loop(),
        4 => coupling_laws(),
        5 => representations(seed),
        6 => stein_bound(),
        7 => poisson_decay(seed),
        8 => normal_limit(seed),
        9 => multivariate(seed),
        10 => applications(seed),
        11 => appendix(seed),
        _ => Err(LabError::Invalid(format!("no criterion {id}"))),
    };
    let rows = result.unwrap_or_else(|e| {
        vec![Row::info(&exp(id), "error", e.to_string()).check("no error", "", false)]
    });
    Criterion {
        id,
        title,
        rows,
        elapsed: start.elapsed(),
    }
}

pub fn run_suite(seed: u64) -> Vec<Criterion> {
    (1..=CRITERIA.len()).map(|id| run_criterion(id, seed)).collect()
}

fn exp(id: usize) -> String {
    format!("criterion-{id}")
}

fn exact_row(id: usize, stat: impl Into<String>, model: Model, n: usize, got: &Value, want: &Rational) -> Row {
    let ok = got.as_exact() == Some(want);
    Row::info(&exp(id), stat, got.to_string())
        .model(model)
        .n(n)
        .check(fmt_rational(want), "0", ok)
}

fn tally_row(id: usize, what: &str, model: Model, n: usize, total: usize, bad: &[String]) -> Row {
    let mut stat = what.to_string();
    if let Some(first) = bad.first() {
        stat += &format!(" (first mismatch: {first})");
    }
    Row::info(&exp(id), stat, format!("{}/{} equal", total - bad.len(), total))
        .model(model)
        .n(n)
        .check(format!("{total}/{total} equal"), "0", bad.is_empty())
}

fn within(id: usize, stat: impl Into<String>, model: Model, est: f64, target: f64, tol: f64) -> Row {
    Row::info(&exp(id), stat, fmt_real(est))
        .model(model)
        .check(fmt_real(target), fmt_real(tol), (est - target).abs() <= tol)
}

fn one() -> Rational {
    Rational::one()
}

fn small_keys(model: Model) -> Vec<TreeKey> {
    (1..=3)
        .flat_map(|k| match model {
            Model::Bst => all_binary_trees(k).iter().map(TreeKey::of_binary_tree).collect::<Vec<_>>(),
            Model::Rrt => all_unordered_keys(k),
        })
        .collect()
}

fn key_tree(key: &TreeKey) -> Result<fringe_core::trees::AnyTree, LabError> {
    Ok(match key.mode() {
        TreeMode::Binary => fringe_core::trees::AnyTree::Binary(key.to_binary()?),
        _ => fringe_core::trees::AnyTree::Ordered(key.to_ordered()?),
    })
}

/// Closed-form covariance of two count statistics through the most
/// specific formula available.
fn formula_cov(model: Model, n: usize, a: &Stat, b: &Stat) -> Result<Rational, LabError> {
    match (a, b) {
        (Stat::Count(k), Stat::Count(m)) => Ok(cov_size_counts(model, n, *k, *m)),
        (Stat::TreeCount(s), Stat::TreeCount(t)) => {
            let (big, small) = if s.size() >= t.size() { (s, t) } else { (t, s) };
            let q = count_matching(key_tree(big)?.as_ref(), small)?;
            let pb = class_prob(model, big.size(), &Property::Tree(big.clone()))?;
            let ps = class_prob(model, small.size(), &Property::Tree(small.clone()))?;
            Ok(cov_tree_counts(model, n, big, small, &pb, &ps, q)?)
        }
        _ => {
            let ca = fringe_class(a).expect("count statistic");
            let cb = fringe_class(b).expect("count statistic");
            class_cov(model, n, &ca, &cb)
        }
    }
}

fn exact_vs_oracle() -> Result<Vec<Row>, LabError> {
    let id = 1;
    let mut rows = Vec::new();
    for model in [Model::Bst, Model::Rrt] {
        let keys = small_keys(model);
        for n in 1..=9 {
            let mut stats: Vec<Stat> = (1..=n).map(Stat::Count).collect();
            stats.extend(keys.iter().cloned().map(Stat::TreeCount));
            stats.push(Stat::PropertyCount {
                k: 3,
                property: Property::Cherry,
            });
            for k in 2..=4 {
                stats.push(Stat::PropertyCount {
                    k,
                    property: Property::RightPath,
                });
            }
            let table = exact_moments_table(model, n, &stats)?;
            let (mut bad_mean, mut bad_var, mut bad_cov) = (Vec::new(), Vec::new(), Vec::new());
            let mut n_cov = 0;
            for (i, s) in stats.iter().enumerate() {
                let class = fringe_class(s).expect("count statistic");
                let (mean, var) = match s {
                    Stat::Count(k) => (mean_count(model, n, *k), var_count(model, n, *k)),
                    _ => (class_mean(model, n, &class)?, class_var(model, n, &class)?),
                };
                if table.means[i].as_exact() != Some(&mean) {
                    bad_mean.push(format!("{s}: {} vs {}", table.means[i], fmt_rational(&mean)));
                }
                if table.cov[i][i].as_exact() != Some(&var) {
                    bad_var.push(format!("{s}: {} vs {}", table.cov[i][i], fmt_rational(&var)));
                }
                for (j, t) in stats.iter().enumerate().skip(i + 1) {
                    n_cov += 1;
                    let c = formula_cov(model, n, s, t)?;
                    if table.cov[i][j].as_exact() != Some(&c) {
                        bad_cov.push(format!("{s},{t}: {} vs {}", table.cov[i][j], fmt_rational(&c)));
                    }
                }
            }
            rows.push(tally_row(id, "means", model, n, stats.len(), &bad_mean));
            rows.push(tally_row(id, "variances", model, n, stats.len(), &bad_var));
            rows.push(tally_row(id, "covariances", model, n, n_cov, &bad_cov));
        }
    }
    // Variance branches at the window-overlap boundary.
    for (n, k) in [(5, 2), (7, 3)] {
        let (_, v) = exact_moments(Model::Bst, n, &Stat::Count(k))?;
        rows.push(exact_row(id, format!("var count({k})"), Model::Bst, n, &v, &var_count(Model::Bst, n, k)));
    }
    // Pinned (n, k, m) cases of the size-count covariance.
    let pinned: [(Model, usize, usize, usize); 9] = [
        (Model::Bst, 9, 3, 2),
        (Model::Bst, 6, 3, 2),
        (Model::Bst, 5, 3, 2),
        (Model::Bst, 4, 4, 2),
        (Model::Bst, 4, 4, 4),
        (Model::Rrt, 9, 3, 2),
        (Model::Rrt, 5, 3, 2),
        (Model::Rrt, 4, 3, 2),
        (Model::Rrt, 4, 4, 2),
    ];
    for (model, n, k, m) in pinned {
        let got = crate::oracle::exact_cov(model, n, &Stat::Count(k), &Stat::Count(m))?;
        rows.push(exact_row(
            id,
            format!("cov count({k}),count({m})"),
            model,
            n,
            &got,
            &cov_size_counts(model, n, k, m),
        ));
    }
    Ok(rows)
}

fn protected_three_ways() -> Result<Vec<Row>, LabError> {
    let id = 2;
    let model = Model::Bst;
    let combo = Toll::LeafProtectedCombo;
    let mo = toll_moments(model, &combo, 9)?;
    let mut rows = Vec::new();
    for n in 4..=9 {
        let (mean, var) = exact_moments(model, n, &Stat::Protected(2))?;
        let target = rat(11 * n as i64 - 19, 30);
        rows.push(exact_row(id, "mean protected(2) [enumeration]", model, n, &mean, &target));
        let mf = mean_f(model, n, &mo.mu[..n])?;
        rows.push(exact_row(id, "mean protected(2) [toll moments]", model, n, &mf, &target));
        let vf = var_f(model, n, &mo.mu[..n], &mo.cross[..n])?;
        let vp = exact_var_via_psi(model, &combo, n)?;
        let v_exact = var.as_exact().cloned().unwrap_or_else(Rational::zero);
        rows.push(exact_row(id, "var protected(2) [toll moments = enumeration]", model, n, &vf, &v_exact));
        rows.push(exact_row(id, "var protected(2) [psi recursion = enumeration]", model, n, &vp, &v_exact));
        if n >= 8 {
            let target = rat(29 * (n as i64 + 1), 225);
            rows.push(exact_row(id, "var protected(2) [enumeration]", model, n, &var, &target));
            rows.push(exact_row(id, "var protected(2) [toll moments]", model, n, &vf, &target));
            rows.push(exact_row(id, "var protected(2) [psi recursion]", model, n, &vp, &target));
        }
    }
    Ok(rows)
}

/// Summation length for the leaf-toll variance slope.
pub const PSI_SUM_TERMS: usize = 100_000;

fn psi_closed_loop() -> Result<Vec<Row>, LabError> {
    let id = 3;
    let mut rows = Vec::new();
    let leaves = |n: usize, _: usize, _: usize| rat((n == 1) as i64, 1);
    let table = psi_bst(leaves, 12);
    for k in 3..=12 {
        let want = if k == 3 { rat(2, 9) } else { rat(4, 9 * k as i64) };
        rows.push(
            Row::info(&exp(id), format!("psi({k}) leaves"), fmt_rational(&table.psi[k]))
                .model(Model::Bst)
                .check(fmt_rational(&want), "0", table.psi[k] == want),
        );
    }
    let t = psi_bst(|n, _, _| if n == 1 { 1.0 } else { 0.0 }, PSI_SUM_TERMS);
    let sum: f64 = (1..=PSI_SUM_TERMS)
        .map(|k| 2.0 * t.psi[k] / ((k + 1) as f64 * (k + 2) as f64))
        .sum();
    rows.push(within(id, format!("sigma^2 leaves, {PSI_SUM_TERMS} terms"), Model::Bst, sum, 2.0 / 45.0, 1e-9));

    let n_max = 12;
    let no_fit = degeneracy_fit_bst(leaves, n_max).is_none();
    rows.push(
        Row::info(&exp(id), "degeneracy witness for leaves", if no_fit { "none" } else { "found" })
            .model(Model::Bst)
            .check("none", "", no_fit),
    );
    let rrt_leaves = |n: usize, _: &[usize]| rat((n == 1) as i64, 1);
    let no_fit = degeneracy_fit_rrt(rrt_leaves, n_max).is_none();
    rows.push(
        Row::info(&exp(id), "degeneracy witness for leaves", if no_fit { "none" } else { "found" })
            .model(Model::Rrt)
            .check("none", "", no_fit),
    );

    let mut rng = SeedSpec::new(7).stream(0);
    let random: Vec<Rational> = (0..=n_max)
        .map(|_| rat(rng.below(2001) as i64 - 1000, rng.below(97) as i64 + 1))
        .collect();
    let families: Vec<(&str, Vec<Rational>)> = vec![
        ("a_n = n^2", (0..=n_max).map(|n| rat((n * n) as i64, 1)).collect()),
        ("a_n = n^3 - n", (0..=n_max).map(|n| rat((n * n * n - n) as i64, 1)).collect()),
        ("a_n = 2^n", (0..=n_max).map(|n| rat(1 << n, 1)).collect()),
        (
            "a_n = H_n",
            (0..=n_max)
                .map(|n| (1..=n).fold(Rational::zero(), |acc, j| acc + rat(1, j as i64)))
                .collect(),
        ),
        ("a_n random", random),
    ];
    for (name, a) in &families {
        let f = |n: usize, j: usize, r: usize| &a[n] - &a[j] - &a[r];
        let fit = degeneracy_fit_bst(f, n_max);
        let psi_zero = psi_bst(f, n_max).psi.iter().all(Zero::is_zero);
        let ok = fit.is_some() && psi_zero;
        rows.push(
            Row::info(&exp(id), format!("degeneracy witness, {name}"), if ok { "found, psi = 0" } else { "missing" })
                .model(Model::Bst)
                .check("found, psi = 0", "", ok),
        );
        let g = |n: usize, parts: &[usize]| parts.iter().fold(a[n].clone(), |acc, &s| acc - &a[s]);
        let fit = degeneracy_fit_rrt(g, 8);
        let psi = psi_rrt_exact(|n, parts| Value::Exact(g(n, parts)), 8)?;
        let ok = fit.is_some() && psi.psi.iter().all(|v| v.as_exact().is_some_and(Zero::is_zero));
        rows.push(
            Row::info(&exp(id), format!("degeneracy witness, {name}"), if ok { "found, psi = 0" } else { "missing" })
                .model(Model::Rrt)
                .check("found, psi = 0", "", ok),
        );
    }
    Ok(rows)
}

fn coupling_laws() -> Result<Vec<Row>, LabError> {
    let id = 4;
    let mut rows = Vec::new();
    let cherry = Property::Cherry;
    let sweeps: [(Model, Option<&Property>, std::ops::RangeInclusive<usize>); 3] =
        [(Model::Bst, None, 2..=7), (Model::Rrt, None, 2..=7), (Model::Bst, Some(&cherry), 4..=7)];
    for (model, prop, ns) in sweeps {
        for n in ns {
            let ks: Vec<usize> = if prop.is_some() { vec![3] } else { (1..n).collect() };
            for k in ks {
                let p = model.period(n);
                let mut bad = Vec::new();
                let mut circles = 0;
                for i in 1..=p as i64 {
                    let rep = verify_conditional_law(model, n, k, i, prop)?;
                    circles += rep.circles;
                    if !rep.pass() {
                        bad.push(format!("i={i} {rep:?}"));
                    }
                }
                let what = match prop {
                    Some(pr) => format!("coupling {pr} k={k}, {circles} circles"),
                    None => format!("coupling k={k}, {circles} circles"),
                };
                rows.push(tally_row(id, &what, model, n, p, &bad));
            }
        }
    }
    Ok(rows)
}

fn law_key(v: &Value) -> String {
    v.to_string()
}

fn add_mass(law: &mut BTreeMap<String, Rational>, key: String, w: &Rational) {
    *law.entry(key).or_insert_with(Rational::zero) += w;
}

/// Stamp circles checked pointwise, and their size.
pub const POINTWISE_CIRCLES: u64 = 10_000;
pub const POINTWISE_N: usize = 1000;

fn representations(seed: u64) -> Result<Vec<Row>, LabError> {
    let id = 5;
    let mut rows = Vec::new();
    let bin_cherry = TreeKey::parse(TreeMode::Binary, "((..)(..))")?;
    let rrt_cherry = TreeKey::of_ordered_tree(&rrt_from_attachments(&[1, 1])?, TreeMode::Unordered)?;
    let tolls = |model: Model| {
        let cherry = match model {
            Model::Bst => bin_cherry.clone(),
            Model::Rrt => rrt_cherry.clone(),
        };
        vec![Toll::SizeIndicator(1), Toll::SizeIndicator(2), Toll::TreeMatch(cherry)]
    };
    for model in [Model::Bst, Model::Rrt] {
        for f in tolls(model) {
            for n in 1..=6 {
                let mut linear = BTreeMap::new();
                let mut err = None;
                enumerate_model(model, n, |t, w| match additive_functional(t, &f) {
                    Ok(v) => add_mass(&mut linear, law_key(&v), w),
                    Err(e) => err = Some(e),
                })?;
                let p = model.period(n);
                let w = Rational::new(1.into(), fringe_core::perm::factorial(p).expect("small").into());
                let mut cyclic = BTreeMap::new();
                enumerate_stamp_circles(p, |c| {
                    let v = match model {
                        Model::Bst => eval_cyclic_bst(c, &f),
                        Model::Rrt => eval_cyclic_rrt(c, &f),
                    };
                    match v {
                        Ok(v) => add_mass(&mut cyclic, law_key(&v), &w),
                        Err(e) => err = Some(e),
                    }
                })?;
                if let Some(e) = err {
                    return Err(e.into());
                }
                let show = |l: &BTreeMap<String, Rational>| {
                    l.iter().map(|(k, v)| format!("{k}:{}", fmt_rational(v))).collect::<Vec<_>>().join(" ")
                };
                rows.push(
                    Row::info(&exp(id), format!("cyclic law of {}", f.to_name()), show(&cyclic))
                        .model(model)
                        .n(n)
                        .check(show(&linear), "0", cyclic == linear),
                );
            }
        }
    }
    // Pointwise identities on random circles.
    let spec = SeedSpec::new(seed);
    for model in [Model::Bst, Model::Rrt] {
        let fs = tolls(model);
        let p = model.period(POINTWISE_N);
        let mut bad = Vec::new();
        let mut ranks = Vec::with_capacity(p);
        for r in 0..POINTWISE_CIRCLES {
            random_stamps(&mut spec.stream(r), p, &mut ranks);
            let circle = StampCircle::new(ranks.iter().map(|&x| x - 1).collect())?;
            let lin = circle.rotate_to_min().linear_part();
            let bin = BinaryTree::from_stamps(&lin);
            for f in &fs {
                let (a, b, c) = match model {
                    Model::Bst => (
                        eval_linear_bst(&lin, f)?,
                        additive_functional(TreeRef::from(&bin), f)?,
                        eval_cyclic_bst(&circle, f)?,
                    ),
                    Model::Rrt => {
                        let t = rotation_to_ordered(&bin);
                        (
                            eval_linear_rrt(&lin, f)?,
                            additive_functional(TreeRef::from(&t), f)?,
                            eval_cyclic_rrt(&circle, f)?,
                        )
                    }
                };
                if a != b || a != c {
                    bad.push(format!("circle {r} {}: {a} {b} {c}", f.to_name()));
                }
            }
        }
        rows.push(tally_row(
            id,
            "linear form = tree functional = cyclic form",
            model,
            POINTWISE_N,
            POINTWISE_CIRCLES as usize * fs.len(),
            &bad,
        ));
    }
    Ok(rows)
}

fn stein_bound() -> Result<Vec<Row>, LabError> {
    let id = 6;
    let mut rows = Vec::new();
    for model in [Model::Bst, Model::Rrt] {
        for n in 2..=9 {
            let stats: Vec<Stat> = (1..n).map(Stat::Count).collect();
            let law = exact_law(model, n, &stats)?;
            for k in 1..n {
                let pmf = law.integer_pmf(k - 1).expect("integer counts");
                let mu = to_f64(&mean_count(model, n, k));
                let tv = crate::oracle::tv_to_poisson(&pmf, mu);
                let rhs = stein_bound_rhs(model, n, k, &one())?;
                let special = model == Model::Bst && n % 2 == 1 && k == (n - 1) / 2;
                let label = if special {
                    format!("tv count({k}) <= bound [single neutral neighbour]")
                } else {
                    format!("tv count({k}) <= bound")
                };
                let rhs_f = to_f64(&rhs);
                rows.push(
                    Row::info(&exp(id), label, fmt_real(tv))
                        .model(model)
                        .n(n)
                        .check(format!("<= {}", fmt_rational(&rhs)), "1e-12", tv <= rhs_f + 1e-12),
                );
            }
        }
    }
    Ok(rows)
}

pub const DECAY_N: usize = 20_000;
pub const DECAY_REPS: u64 = 200_000;

fn poisson_decay(seed: u64) -> Result<Vec<Row>, LabError> {
    let id = 7;
    let ks = [10, 20, 40];
    let stats: Vec<Stat> = ks.iter().map(|&k| Stat::Count(k)).collect();
    let mut rows = Vec::new();
    for model in [Model::Bst, Model::Rrt] {
        let s = sample_statistics(model, DECAY_N, &stats, DECAY_REPS, seed, false)?;
        let mut tvs = Vec::new();
        for (i, &k) in ks.iter().enumerate() {
            let mu = to_f64(&mean_count(model, DECAY_N, k));
            let (tv, hw) = tv_empirical_to_poisson(&s, i, mu)?;
            tvs.push(tv);
            let mut row = Row::info(&exp(id), format!("tv count({k})"), fmt_real(tv))
                .model(model)
                .n(DECAY_N)
                .sampled(DECAY_REPS, seed);
            row.tolerance = Some(format!("+-{}", fmt_real(hw)));
            rows.push(row);
        }
        for w in 0..2 {
            rows.push(
                Row::info(
                    &exp(id),
                    format!("tv count({}) < tv count({})", ks[w + 1], ks[w]),
                    fmt_real(tvs[w + 1]),
                )
                .model(model)
                .n(DECAY_N)
                .sampled(DECAY_REPS, seed)
                .check(format!("< {}", fmt_real(tvs[w])), "0", tvs[w + 1] < tvs[w]),
            );
        }
    }
    Ok(rows)
}

pub const NORMAL_N: usize = 10_000;
pub const NORMAL_REPS: u64 = 10_000;
pub const KS_THRESHOLD: f64 = 0.03;

fn ks_row(id: usize, stat: &str, model: Model, seed: u64, ks: f64) -> Row {
    Row::info(&exp(id), stat, fmt_real(ks))
        .model(model)
        .n(NORMAL_N)
        .sampled(NORMAL_REPS, seed)
        .check(format!("<= {KS_THRESHOLD}"), "0", ks <= KS_THRESHOLD)
}

fn normal_limit(seed: u64) -> Result<Vec<Row>, LabError> {
    let id = 8;
    let mut rows = Vec::new();
    let n = NORMAL_N;
    for model in [Model::Bst, Model::Rrt] {
        let s = sample_statistics(model, n, &[Stat::Count(1)], NORMAL_REPS, seed, false)?;
        let mean = to_f64(&mean_count(model, n, 1));
        let sd = to_f64(&var_count(model, n, 1)).sqrt();
        rows.push(ks_row(id, "ks count(1), exact centering", model, seed, ks_to_normal(&s, 0, mean, sd)?));
    }
    let s = sample_statistics(Model::Bst, n, &[Stat::Protected(2)], NORMAL_REPS, seed, false)?;
    let nf = n as f64;
    let center = 11.0 * nf / 30.0;
    let scale = (29.0 * (nf + 1.0) / 225.0).sqrt();
    rows.push(ks_row(id, "ks protected(2), linear centering", Model::Bst, seed, ks_to_normal(&s, 0, center, scale)?));
    Ok(rows)
}

fn cov_rows(id: usize, model: Model, stats: &[Stat], seed: u64) -> Result<Vec<Row>, LabError> {
    let s = sample_statistics(model, NORMAL_N, stats, NORMAL_REPS, seed, false)?;
    let cov = empirical_cov_matrix(&s);
    let slopes = crate::classes::slope_matrix(model, stats)?;
    let slopes_f: Vec<Vec<f64>> = slopes.iter().map(|r| r.iter().map(to_f64).collect()).collect();
    let norm = model.period(NORMAL_N) as f64;
    let mut rows = Vec::new();
    for i in 0..stats.len() {
        for j in i..stats.len() {
            let est = cov[i][j] / norm;
            let target = slopes_f[i][j];
            let tol = 0.1 * target.abs();
            rows.push(
                Row::info(&exp(id), format!("cov/N {},{}", stats[i], stats[j]), fmt_real(est))
                    .model(model)
                    .n(NORMAL_N)
                    .sampled(NORMAL_REPS, seed)
                    .check(fmt_rational(&slopes[i][j]), fmt_real(tol), (est - target).abs() <= tol),
            );
        }
    }
    let worst = compare_to_gamma(&cov, &slopes_f, norm);
    rows.push(
        Row::info(&exp(id), "max relative deviation", fmt_real(worst))
            .model(model)
            .n(NORMAL_N)
            .sampled(NORMAL_REPS, seed)
            .check("0", "0.1", worst <= 0.1),
    );
    Ok(rows)
}

fn multivariate(seed: u64) -> Result<Vec<Row>, LabError> {
    let id = 9;
    let leaf = TreeKey::parse(TreeMode::Binary, "(..)")?;
    let cherry = TreeKey::parse(TreeMode::Binary, "((..)(..))")?;
    let mut rows = cov_rows(id, Model::Bst, &[Stat::TreeCount(leaf.clone()), Stat::TreeCount(cherry.clone())], seed)?;
    rows.extend(cov_rows(id, Model::Rrt, &[Stat::Count(1), Stat::Count(2)], seed)?);

    let classes = [(1, Property::Tree(leaf)), (3, Property::Tree(cherry)), (3, Property::RightPath)];
    let gamma: Vec<Vec<Rational>> = classes
        .iter()
        .map(|a| classes.iter().map(|b| class_slope(Model::Bst, a, b)).collect())
        .collect::<Result<_, _>>()?;
    let show = |m: &[Vec<Rational>]| {
        m.iter()
            .map(|r| r.iter().map(fmt_rational).collect::<Vec<_>>().join(" "))
            .collect::<Vec<_>>()
            .join("; ")
    };
    let pd = is_positive_definite(&gamma);
    rows.push(
        Row::info(&exp(id), "limit matrix {leaf, cherry, right-path(3)} positive definite", show(&gamma))
            .model(Model::Bst)
            .check("positive definite", "exact", pd),
    );
    let hat: Vec<Vec<Rational>> = (1..=3).map(|k| (1..=3).map(|m| sigma_size(Model::Rrt, k, m)).collect()).collect();
    let pd = is_positive_definite(&hat);
    rows.push(
        Row::info(&exp(id), "limit matrix of count(1..3) positive definite", show(&hat))
            .model(Model::Rrt)
            .check("positive definite", "exact", pd),
    );
    Ok(rows)
}

pub const OUTDEGREE_N: usize = 100_000;
pub const OUTDEGREE_REPS: u64 = 200;
pub const LIMIT_DRAWS: u64 = 1_000_000;
pub const SHAPE_N: usize = 100_000;
pub const SHAPE_REPS: u64 = 50;
pub const ENTROPY_TERMS: usize = 1_000_000;

fn applications(seed: u64) -> Result<Vec<Row>, LabError> {
    let id = 10;
    let mut rows = Vec::new();

    let stats: Vec<Stat> = (0..=4).map(Stat::Outdegree).collect();
    let s = sample_statistics(Model::Rrt, OUTDEGREE_N, &stats, OUTDEGREE_REPS, seed, false)?;
    let nf = OUTDEGREE_N as f64;
    for d in 0..=4 {
        let target = 0.5f64.powi(d as i32 + 1);
        rows.push(
            within(id, format!("outdegree({d}) / n"), Model::Rrt, s.mean(d) / nf, target, 5.0 * s.se(d) / nf)
                .n(OUTDEGREE_N)
                .sampled(OUTDEGREE_REPS, seed),
        );
    }

    let limits = [
        (Model::Bst, LimitStat::RootProtected(2), 11.0 / 30.0),
        (Model::Bst, LimitStat::RootProtected(3), 1249.0 / 8100.0),
        (Model::Rrt, LimitStat::RootProtected(2), 0.5 - (-1f64).exp()),
    ];
    for (model, stat, target) in limits {
        let e = limit_fringe_estimate(model, stat, LIMIT_DRAWS, seed)?;
        rows.push(
            within(id, format!("limit fringe {stat}"), model, e.mean, target, 5.0 * e.se).sampled(LIMIT_DRAWS, seed),
        );
    }

    let mu: Vec<f64> = (1..=9).map(|k| (k as f64).ln()).collect();
    for n in 1..=9 {
        let (m, _) = exact_moments(Model::Bst, n, &Stat::Additive(Toll::LogSize))?;
        let f = mean_f(Model::Bst, n, &mu[..n])?;
        rows.push(within(id, "E log(1/p(T_n)) vs mean of log-size toll", Model::Bst, m.to_f64(), f, 1e-10).n(n));
    }

    let c = shape_entropy_constant(ENTROPY_TERMS);
    let s = sample_statistics(Model::Bst, SHAPE_N, &[Stat::Additive(Toll::LogSize)], SHAPE_REPS, seed, false)?;
    let target = SHAPE_N as f64 * c;
    rows.push(
        within(id, "E log(1/p(T_n)) vs n * entropy constant", Model::Bst, s.mean(0), target, 0.01 * target)
            .n(SHAPE_N)
            .sampled(SHAPE_REPS, seed),
    );
    Ok(rows)
}

pub const APPENDIX_M: usize = 10_000;
pub const APPENDIX_REPS: u64 = 16;

fn appendix(seed: u64) -> Result<Vec<Row>, LabError> {
    let id = 11;
    let table = appendix_partial_sums(APPENDIX_M, APPENDIX_REPS, seed)?;
    let increasing = table.windows(2).all(|w| w[1].cumulative > w[0].cumulative);
    let last = table.last().expect("nonempty").cumulative;
    let mut rows = vec![Row::info(&exp(id), "cumulative sums strictly increasing", fmt_real(last))
        .model(Model::Bst)
        .n(APPENDIX_M)
        .sampled(APPENDIX_REPS, seed)
        .check("increasing", "", increasing)];
    let slope = appendix_slope(&table, 10, 25);
    let c = shape_entropy_constant(ENTROPY_TERMS);
    rows.push(
        within(id, "slope of cumulative sum against log M", Model::Bst, slope, c, 0.25 * c)
            .n(APPENDIX_M)
            .sampled(APPENDIX_REPS, seed),
    );
    Ok(rows)
}
