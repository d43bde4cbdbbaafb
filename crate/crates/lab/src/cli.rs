//! The `fringe` command line.

use clap::{Parser, Subcommand};
use fringe_core::couplings::verify_conditional_law;
use fringe_core::exact::{
    asymptotic_sigma2_f, cov_size_counts, degeneracy_fit_bst, degeneracy_fit_rrt, exact_var_via_psi, mean_count,
    mean_f, normalizer, pi_limit, psi_bst, psi_rrt_exact, sigma_size, stein_bound_rhs, toll_moments, var_count,
    var_f,
};
use fringe_core::exact::psi::{binary_split_toll, recursive_split_toll};
use fringe_core::rational::{fmt_rational, fmt_real, to_f64};
use fringe_core::stat::Stat;
use fringe_core::trees::{Property, Toll, TollFunction};
use fringe_core::{rat, Model, Rational, Value};
use num_traits::Zero;

use crate::acceptance;
use crate::approx::{compare_to_gamma, empirical_cov_matrix, ks_to_normal, sample_statistics, tv_empirical_to_poisson};
use crate::classes::{class_cov, class_mean, class_prob, class_slope, class_var, fringe_class, slope_matrix};
use crate::config::{ExperimentConfig, GlobalArgs, DEFAULT_DRAWS};
use crate::limit::{appendix_partial_sums, appendix_slope, limit_fringe_estimate, shape_entropy_constant, LimitStat};
use crate::oracle::{exact_law, exact_tv_to_poisson};
use crate::report::{Report, Row};
use crate::LabError;

#[derive(Debug, Parser)]
#[command(name = "fringe", version, about = "Fringe-subtree statistics of random binary search trees and random recursive trees")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form exact values (means, variances, covariances, psi, Stein bound).
    Exact(ExperimentConfig),
    /// Exhaustive enumeration of all trees of size n <= 10.
    Oracle(ExperimentConfig),
    /// Monte Carlo means and variances.
    Simulate(ExperimentConfig),
    /// Total variation distance of a count to its Poisson approximation.
    Tv(ExperimentConfig),
    /// Kolmogorov distance of a standardized statistic to the normal law.
    Ks(ExperimentConfig),
    /// Empirical covariance slopes against their limits.
    Cov(ExperimentConfig),
    /// Exhaustive check of the coupling conditional laws.
    CouplingVerify(ExperimentConfig),
    /// Root-local estimates for the limiting fringe tree.
    LimitFringe(ExperimentConfig),
    /// Partial sums of the shape-entropy series.
    AppendixSums(ExperimentConfig),
    /// Run a suite of checks (`--suite acceptance`).
    Report(ExperimentConfig),
    /// List the built-in toll functions.
    Tolls(ExperimentConfig),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Exact(_) => "exact",
            Command::Oracle(_) => "oracle",
            Command::Simulate(_) => "simulate",
            Command::Tv(_) => "tv",
            Command::Ks(_) => "ks",
            Command::Cov(_) => "cov",
            Command::CouplingVerify(_) => "coupling-verify",
            Command::LimitFringe(_) => "limit-fringe",
            Command::AppendixSums(_) => "appendix-sums",
            Command::Report(_) => "report",
            Command::Tolls(_) => "tolls",
        }
    }

    fn config(&self) -> &ExperimentConfig {
        match self {
            Command::Exact(c)
            | Command::Oracle(c)
            | Command::Simulate(c)
            | Command::Tv(c)
            | Command::Ks(c)
            | Command::Cov(c)
            | Command::CouplingVerify(c)
            | Command::LimitFringe(c)
            | Command::AppendixSums(c)
            | Command::Report(c)
            | Command::Tolls(c) => c,
        }
    }
}

/// Parses, runs and writes the report; returns the process exit code.
pub fn main_with_args(args: impl IntoIterator<Item = std::ffi::OsString>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match run_cli(&cli) {
        Ok(report) => {
            if let Err(e) = emit(&cli.global, &report) {
                eprintln!("error: {e}");
                return e.exit_code();
            }
            if report.passed() {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn emit(global: &GlobalArgs, report: &Report) -> Result<(), LabError> {
    let format = global.format.unwrap_or_default();
    match &global.output {
        Some(path) => {
            let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
            report.write(format, &mut f)
        }
        None => report.write(format, &mut std::io::stdout().lock()),
    }
}

/// Merges the config file, sizes the worker pool and dispatches.
pub fn run_cli(cli: &Cli) -> Result<Report, LabError> {
    let base = match &cli.global.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    let cfg = cli.command.config().clone().over(base);
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.global.threads {
        if t == 0 {
            return Err(LabError::Invalid("--threads must be positive".into()));
        }
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| LabError::Invalid(e.to_string()))?;
    pool.install(|| run(cli.command.name(), &cfg))
}

/// Runs one subcommand on a merged configuration.
pub fn run(command: &str, cfg: &ExperimentConfig) -> Result<Report, LabError> {
    let (rows, details) = match command {
        "exact" => (exact(cfg)?, None),
        "oracle" => oracle(cfg)?,
        "simulate" => simulate(cfg)?,
        "tv" => (tv(cfg)?, None),
        "ks" => (ks(cfg)?, None),
        "cov" => (cov(cfg)?, None),
        "coupling-verify" => (coupling(cfg)?, None),
        "limit-fringe" => (limit(cfg)?, None),
        "appendix-sums" => (appendix(cfg)?, None),
        "report" => (suite(cfg)?, None),
        "tolls" => (tolls(), None),
        other => return Err(LabError::Invalid(format!("unknown command `{other}`"))),
    };
    let mut report = Report::new(command, cfg.to_json(command), rows);
    report.details = details;
    Ok(report)
}

fn tolls() -> Vec<Row> {
    Toll::catalog()
        .into_iter()
        .map(|(name, what)| Row::info("tolls", name, what))
        .collect()
}

fn exact_value(stat: &str, model: Model, n: usize, v: impl std::fmt::Display) -> Row {
    Row::info("exact", stat, v.to_string()).model(model).n(n)
}

/// `(k, P)` from --k with --property or --tree, defaulting to all trees of
/// size k.
fn class_from(cfg: &ExperimentConfig, model: Model, tree: Option<&str>) -> Result<(usize, Property), LabError> {
    if let Some(t) = tree {
        let key = cfg.tree_key(Some(t), model)?;
        return Ok((key.size(), Property::Tree(key)));
    }
    let k = cfg.k()?;
    let p = match &cfg.property {
        Some(_) => cfg.property()?,
        None => Property::Any,
    };
    Ok((k, p))
}

fn exact(cfg: &ExperimentConfig) -> Result<Vec<Row>, LabError> {
    let model = cfg.model()?;
    let what = cfg.stat.first().map(String::as_str).unwrap_or("mean-count");
    let mut rows = Vec::new();
    for n in cfg.sizes()? {
        let row = match what {
            "mean-count" | "var-count" => {
                let c = class_from(cfg, model, cfg.tree.as_deref())?;
                let v = match (what, &c.1) {
                    ("mean-count", Property::Any) => mean_count(model, n, c.0),
                    ("var-count", Property::Any) => var_count(model, n, c.0),
                    ("mean-count", _) => class_mean(model, n, &c)?,
                    _ => class_var(model, n, &c)?,
                };
                exact_value(&format!("{what} k={} {}", c.0, c.1), model, n, fmt_rational(&v))
            }
            "cov-count" => {
                let a = class_from(cfg, model, cfg.tree.as_deref())?;
                let b = match (&cfg.tree2, cfg.m) {
                    (Some(t), _) => class_from(cfg, model, Some(t))?,
                    (None, Some(m)) => (m, Property::Any),
                    (None, None) => return Err(LabError::Invalid("cov-count needs --m or --tree2".into())),
                };
                let v = if matches!((&a.1, &b.1), (Property::Any, Property::Any)) {
                    cov_size_counts(model, n, a.0, b.0)
                } else {
                    class_cov(model, n, &a, &b)?
                };
                exact_value(&format!("cov-count k={} {}, m={} {}", a.0, a.1, b.0, b.1), model, n, fmt_rational(&v))
            }
            "sigma" => {
                let a = class_from(cfg, model, cfg.tree.as_deref())?;
                let b = match (&cfg.tree2, cfg.m) {
                    (Some(t), _) => class_from(cfg, model, Some(t))?,
                    (None, Some(m)) => (m, Property::Any),
                    (None, None) => a.clone(),
                };
                let v = if matches!((&a.1, &b.1), (Property::Any, Property::Any)) {
                    sigma_size(model, a.0, b.0)
                } else {
                    class_slope(model, &a, &b)?
                };
                exact_value(&format!("sigma k={} {}, m={} {}", a.0, a.1, b.0, b.1), model, n, fmt_rational(&v))
            }
            "prob" => {
                let c = class_from(cfg, model, cfg.tree.as_deref())?;
                exact_value(&format!("prob k={} {}", c.0, c.1), model, n, fmt_rational(&class_prob(model, c.0, &c.1)?))
            }
            "mean-f" | "var-f" => {
                let f = cfg.toll()?;
                let mo = toll_moments(model, &f, n)?;
                let v = if what == "mean-f" {
                    mean_f(model, n, &mo.mu)?
                } else {
                    var_f(model, n, &mo.mu, &mo.cross)?
                };
                exact_value(&format!("{what} {}", f.to_name()), model, n, v)
            }
            "var-psi" => {
                let f = cfg.toll()?;
                exact_value(&format!("var-psi {}", f.to_name()), model, n, exact_var_via_psi(model, &f, n)?)
            }
            "sigma2-f" => {
                let f = cfg.toll()?;
                exact_value(
                    &format!("sigma2-f {} (sizes <= {n})", f.to_name()),
                    model,
                    n,
                    asymptotic_sigma2_f(model, &f, n)?,
                )
            }
            "psi" => {
                let f = cfg.toll()?;
                let k = cfg.k.unwrap_or(n);
                let v = match model {
                    Model::Bst => psi_bst(binary_split_toll(&f)?, k).psi[k].clone(),
                    Model::Rrt => psi_rrt_exact(recursive_split_toll(&f)?, k)?.psi[k].clone(),
                };
                exact_value(&format!("psi k={k} {}", f.to_name()), model, n, v)
            }
            "degeneracy" => {
                let f = cfg.toll()?;
                let fit = degeneracy_witness(model, &f, n)?;
                let text = match fit {
                    Some(a) => a.iter().map(fmt_rational).collect::<Vec<_>>().join(" "),
                    None => "none".into(),
                };
                exact_value(&format!("degeneracy {}", f.to_name()), model, n, text)
            }
            "stein-rhs" => {
                let c = class_from(cfg, model, cfg.tree.as_deref())?;
                let p = class_prob(model, c.0, &c.1)?;
                exact_value(
                    &format!("stein-rhs k={} {}", c.0, c.1),
                    model,
                    n,
                    fmt_rational(&stein_bound_rhs(model, n, c.0, &p)?),
                )
            }
            other => {
                return Err(LabError::Invalid(format!(
                    "unknown exact quantity `{other}` (mean-count, var-count, cov-count, sigma, prob, mean-f, var-f, \
                     var-psi, sigma2-f, psi, degeneracy, stein-rhs)"
                )))
            }
        };
        rows.push(row);
    }
    Ok(rows)
}

fn exact_rational(v: Value) -> Result<Rational, LabError> {
    v.as_exact()
        .cloned()
        .ok_or_else(|| LabError::Invalid("toll is not rational valued".into()))
}

fn degeneracy_witness(model: Model, f: &Toll, n: usize) -> Result<Option<Vec<Rational>>, LabError> {
    match model {
        Model::Bst => {
            let g = binary_split_toll(f)?;
            // Validate rationality up front so the fit sees plain numbers.
            for m in 1..=n {
                for j in 0..m {
                    exact_rational(g(m, j, m - 1 - j))?;
                }
            }
            Ok(degeneracy_fit_bst(|m, j, r| g(m, j, r).as_exact().cloned().unwrap_or_else(Rational::zero), n))
        }
        Model::Rrt => {
            let g = recursive_split_toll(f)?;
            if g(1, &[]).as_exact().is_none() {
                return Err(LabError::Invalid("toll is not rational valued".into()));
            }
            Ok(degeneracy_fit_rrt(|m, parts| g(m, parts).as_exact().cloned().unwrap_or_else(Rational::zero), n))
        }
    }
}

fn oracle(cfg: &ExperimentConfig) -> Result<(Vec<Row>, Option<serde_json::Value>), LabError> {
    let model = cfg.model()?;
    let stats = cfg.stats(model)?;
    let cap = cfg.cap()?;
    let mut rows = Vec::new();
    let mut laws = serde_json::Map::new();
    for n in cfg.sizes()? {
        if n > cap {
            return Err(LabError::Capacity(format!("oracle enumeration limited to n <= {cap} (asked {n})")));
        }
        let law = exact_law(model, n, &stats)?;
        for (i, s) in stats.iter().enumerate() {
            rows.push(Row::info("oracle", format!("mean {s}"), fmt_rational(&law.mean(i))).model(model).n(n));
            rows.push(Row::info("oracle", format!("var {s}"), fmt_rational(&law.variance(i))).model(model).n(n));
            for (j, t) in stats.iter().enumerate().skip(i + 1) {
                rows.push(
                    Row::info("oracle", format!("cov {s},{t}"), fmt_rational(&law.covariance(i, j)))
                        .model(model)
                        .n(n),
                );
            }
        }
        laws.insert(n.to_string(), law.to_json());
    }
    Ok((rows, Some(serde_json::json!({ "laws": laws }))))
}

/// Exact mean and variance where a closed form applies at size `n`.
fn closed_moments(model: Model, n: usize, stat: &Stat) -> Result<Option<(f64, f64)>, LabError> {
    if let Some(c) = fringe_class(stat) {
        return Ok(Some((to_f64(&class_mean(model, n, &c)?), to_f64(&class_var(model, n, &c)?))));
    }
    if let (Model::Bst, Stat::Protected(2)) = (model, stat) {
        let leaf = (1, Property::Any);
        let cherry = (3, Property::Cherry);
        let mean = rat(n as i64, 1) - rat(2, 1) * class_mean(model, n, &leaf)? + class_mean(model, n, &cherry)?;
        let var = rat(4, 1) * class_var(model, n, &leaf)? - rat(4, 1) * class_cov(model, n, &leaf, &cherry)?
            + class_var(model, n, &cherry)?;
        return Ok(Some((to_f64(&mean), to_f64(&var))));
    }
    let toll = match stat {
        Stat::Additive(t) => t.clone(),
        _ => return Ok(None),
    };
    match toll_moments(model, &toll, n) {
        Ok(mo) => Ok(Some((mean_f(model, n, &mo.mu)?.to_f64(), var_f(model, n, &mo.mu, &mo.cross)?.to_f64()))),
        Err(fringe_core::Error::Capacity(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// `n μ` and `n σ²` from the limit constants (normalizer `n + 1` resp. `n`).
fn limit_moments(model: Model, n: usize, stat: &Stat) -> Result<(f64, f64), LabError> {
    let norm = to_f64(&normalizer(model, n));
    if let Some(c) = fringe_class(stat) {
        let mu = to_f64(&(pi_limit(model, c.0) * class_prob(model, c.0, &c.1)?));
        return Ok((norm * mu, norm * to_f64(&class_slope(model, &c, &c)?)));
    }
    if let (Model::Bst, Stat::Protected(2)) = (model, stat) {
        // n − 2 X^L + X^C: the constant part carries no variance.
        let leaf = (1, Property::Any);
        let cherry = (3, Property::Cherry);
        let mu = rat(1, 1) - rat(2, 1) * pi_limit(model, 1) + pi_limit(model, 3) * class_prob(model, 3, &Property::Cherry)?;
        let var = rat(4, 1) * class_slope(model, &leaf, &leaf)? - rat(4, 1) * class_slope(model, &leaf, &cherry)?
            + class_slope(model, &cherry, &cherry)?;
        return Ok((n as f64 * to_f64(&mu), norm * to_f64(&var)));
    }
    let toll = match stat {
        Stat::Additive(t) => t.clone(),
        _ => return Err(LabError::Invalid(format!("no limit constants for {stat}"))),
    };
    let bound = toll
        .support_bound()
        .ok_or_else(|| LabError::Invalid(format!("limit centering needs a toll of bounded support, not {stat}")))?;
    let mo = toll_moments(model, &toll, bound)?;
    let mu: f64 = mo
        .mu
        .iter()
        .enumerate()
        .map(|(i, m)| to_f64(&pi_limit(model, i + 1)) * m.to_f64())
        .sum();
    Ok((norm * mu, norm * asymptotic_sigma2_f(model, &toll, bound)?.to_f64()))
}

fn simulate(cfg: &ExperimentConfig) -> Result<(Vec<Row>, Option<serde_json::Value>), LabError> {
    let model = cfg.model()?;
    let stats = cfg.stats(model)?;
    let (reps, seed) = (cfg.reps()?, cfg.seed());
    let mut rows = Vec::new();
    let mut pmfs = serde_json::Map::new();
    for n in cfg.sizes()? {
        let s = sample_statistics(model, n, &stats, reps, seed, false)?;
        let mut per_n = serde_json::Map::new();
        for (i, stat) in stats.iter().enumerate() {
            let mut row = Row::info("simulate", format!("mean {stat}"), fmt_real(s.mean(i)))
                .model(model)
                .n(n)
                .sampled(reps, seed);
            let exact = closed_moments(model, n, stat)?;
            if let Some((m, _)) = exact {
                let tol = cfg.tolerance.unwrap_or(5.0 * s.se(i));
                row = row.check(fmt_real(m), fmt_real(tol), (s.mean(i) - m).abs() <= tol);
            }
            rows.push(row);
            let mut vrow = Row::info("simulate", format!("var {stat}"), fmt_real(s.var(i)))
                .model(model)
                .n(n)
                .sampled(reps, seed);
            if let Some((_, v)) = exact {
                vrow.target = Some(fmt_real(v));
            }
            rows.push(vrow);
            if let Some(p) = s.pmf(i) {
                let m: serde_json::Map<String, serde_json::Value> =
                    p.into_iter().map(|(v, q)| (v.to_string(), fmt_real(q).into())).collect();
                per_n.insert(stat.to_string(), m.into());
            }
        }
        pmfs.insert(n.to_string(), per_n.into());
    }
    Ok((rows, Some(serde_json::json!({ "pmf": pmfs }))))
}

fn single_stat(cfg: &ExperimentConfig, model: Model) -> Result<Stat, LabError> {
    if cfg.stat.is_empty() {
        return Ok(Stat::Count(cfg.k()?));
    }
    let s = cfg.stats(model)?;
    if s.len() != 1 {
        return Err(LabError::Invalid("exactly one --stat expected".into()));
    }
    Ok(s.into_iter().next().expect("one"))
}

fn tv(cfg: &ExperimentConfig) -> Result<Vec<Row>, LabError> {
    let model = cfg.model()?;
    let stat = single_stat(cfg, model)?;
    if !stat.is_integer() {
        return Err(LabError::Invalid(format!("{stat} is not integer valued")));
    }
    let (reps, seed) = (cfg.reps()?, cfg.seed());
    let mut rows = Vec::new();
    for n in cfg.sizes()? {
        let s = sample_statistics(model, n, std::slice::from_ref(&stat), reps, seed, false)?;
        let lambda = match cfg.lambda {
            Some(l) => l,
            None => match closed_moments(model, n, &stat)? {
                Some((m, _)) => m,
                None => s.mean(0),
            },
        };
        let (d, hw) = tv_empirical_to_poisson(&s, 0, lambda)?;
        let mut row = Row::info("tv", format!("tv {stat} to Po({})", fmt_real(lambda)), fmt_real(d))
            .model(model)
            .n(n)
            .sampled(reps, seed);
        match cfg.tolerance {
            Some(t) => row = row.check(format!("<= {}", fmt_real(t)), format!("+-{}", fmt_real(hw)), d <= t),
            None => row.tolerance = Some(format!("+-{}", fmt_real(hw))),
        }
        rows.push(row);
        if n <= cfg.cap()? {
            let law = exact_law(model, n, std::slice::from_ref(&stat))?;
            let e = exact_tv_to_poisson(&law, lambda)?;
            rows.push(Row::info("tv", format!("exact tv {stat} to Po({})", fmt_real(lambda)), fmt_real(e)).model(model).n(n));
        }
    }
    Ok(rows)
}

fn ks(cfg: &ExperimentConfig) -> Result<Vec<Row>, LabError> {
    let model = cfg.model()?;
    let stat = single_stat(cfg, model)?;
    let (reps, seed) = (cfg.reps()?, cfg.seed());
    let center = cfg.center.as_deref().unwrap_or("exact");
    let mut rows = Vec::new();
    for n in cfg.sizes()? {
        let (m, v) = match center {
            "exact" => closed_moments(model, n, &stat)?
                .ok_or_else(|| LabError::Invalid(format!("no exact moments for {stat}; try --center limit")))?,
            "limit" => limit_moments(model, n, &stat)?,
            other => return Err(LabError::Invalid(format!("--center must be exact or limit, not `{other}`"))),
        };
        if !(v > 0.0) {
            return Err(LabError::Invalid(format!("{stat} has zero variance at n = {n}")));
        }
        let s = sample_statistics(model, n, std::slice::from_ref(&stat), reps, seed, !stat.is_integer())?;
        let d = ks_to_normal(&s, 0, m, v.sqrt())?;
        let mut row = Row::info("ks", format!("ks {stat}, {center} centering"), fmt_real(d))
            .model(model)
            .n(n)
            .sampled(reps, seed);
        if let Some(t) = cfg.tolerance {
            row = row.check(format!("<= {}", fmt_real(t)), "0", d <= t);
        }
        rows.push(row);
    }
    Ok(rows)
}

fn cov(cfg: &ExperimentConfig) -> Result<Vec<Row>, LabError> {
    let model = cfg.model()?;
    let stats = cfg.stats(model)?;
    let (reps, seed) = (cfg.reps()?, cfg.seed());
    let tol = cfg.tolerance.unwrap_or(0.1);
    let slopes = slope_matrix(model, &stats)?;
    let slopes_f: Vec<Vec<f64>> = slopes.iter().map(|r| r.iter().map(to_f64).collect()).collect();
    let mut rows = Vec::new();
    for n in cfg.sizes()? {
        let s = sample_statistics(model, n, &stats, reps, seed, false)?;
        let c = empirical_cov_matrix(&s);
        let norm = model.period(n) as f64;
        for i in 0..stats.len() {
            for j in i..stats.len() {
                let est = c[i][j] / norm;
                let target = slopes_f[i][j];
                let mut row = Row::info("cov", format!("cov/N {},{}", stats[i], stats[j]), fmt_real(est))
                    .model(model)
                    .n(n)
                    .sampled(reps, seed);
                if target.abs() > 1e-4 {
                    let t = tol * target.abs();
                    row = row.check(fmt_rational(&slopes[i][j]), fmt_real(t), (est - target).abs() <= t);
                } else {
                    row.target = Some(fmt_rational(&slopes[i][j]));
                }
                rows.push(row);
            }
        }
        let worst = compare_to_gamma(&c, &slopes_f, norm);
        rows.push(
            Row::info("cov", "max relative deviation", fmt_real(worst))
                .model(model)
                .n(n)
                .sampled(reps, seed)
                .check("0", fmt_real(tol), worst <= tol),
        );
    }
    Ok(rows)
}

fn coupling(cfg: &ExperimentConfig) -> Result<Vec<Row>, LabError> {
    let model = cfg.model()?;
    let prop = match &cfg.property {
        Some(_) => Some(cfg.property()?),
        None => None,
    };
    let mut rows = Vec::new();
    for n in cfg.sizes()? {
        let ks: Vec<usize> = match (cfg.k, &prop) {
            (Some(k), _) => vec![k],
            (None, Some(_)) => vec![3],
            (None, None) => (1..n).collect(),
        };
        let is: Vec<i64> = match cfg.i {
            Some(i) => vec![i as i64],
            None => (1..=model.period(n) as i64).collect(),
        };
        for &k in &ks {
            for &i in &is {
                let r = verify_conditional_law(model, n, k, i, prop.as_ref())?;
                let mut estimate = format!(
                    "law={} cases={} event={} minimal={} circles={}",
                    r.law_match, r.case_table_ok, r.event_achieved, r.exchange_minimal, r.circles
                );
                if let Some(b) = r.boundary_frequencies {
                    estimate += &format!(" boundary(below,equal,above)={b:?}");
                }
                let label = match &r.property {
                    Some(p) => format!("coupling {p} k={k} i={i}"),
                    None => format!("coupling k={k} i={i}"),
                };
                rows.push(Row::info("coupling-verify", label, estimate).model(model).n(n).check(
                    "all true",
                    "exact",
                    r.pass(),
                ));
            }
        }
    }
    Ok(rows)
}

/// Known limit values of root-local indicators.
fn limit_target(model: Model, stat: LimitStat) -> Option<(String, f64)> {
    let r = |q: Rational| Some((fmt_rational(&q), to_f64(&q)));
    match (model, stat) {
        (_, LimitStat::SizeIs(k)) if k >= 1 => r(pi_limit(model, k as usize)),
        (_, LimitStat::RootProtected(0)) => r(rat(1, 1)),
        (Model::Bst, LimitStat::RootProtected(1)) => r(rat(2, 3)),
        (Model::Bst, LimitStat::RootProtected(2)) => r(rat(11, 30)),
        (Model::Bst, LimitStat::RootProtected(3)) => r(rat(1249, 8100)),
        (Model::Rrt, LimitStat::RootProtected(1)) => r(rat(1, 2)),
        (Model::Rrt, LimitStat::RootProtected(2)) => Some(("1/2 - 1/e".into(), 0.5 - (-1f64).exp())),
        (Model::Bst, LimitStat::RootDegree(d)) if d <= 2 => r(rat(1, 3)),
        (Model::Rrt, LimitStat::RootDegree(d)) if d < 60 => r(rat(1, 1i64 << (d + 1))),
        _ => None,
    }
}

fn limit(cfg: &ExperimentConfig) -> Result<Vec<Row>, LabError> {
    let model = cfg.model()?;
    let draws = cfg.draws.unwrap_or(DEFAULT_DRAWS);
    let seed = cfg.seed();
    if cfg.stat.is_empty() {
        return Err(LabError::Invalid("--stat is required (size(k), protected(l) or root-degree(d))".into()));
    }
    let mut rows = Vec::new();
    for s in &cfg.stat {
        let stat: LimitStat = s.parse()?;
        let e = limit_fringe_estimate(model, stat, draws, seed)?;
        let mut row = Row::info("limit-fringe", stat.to_string(), fmt_real(e.mean)).model(model).sampled(draws, seed);
        match limit_target(model, stat) {
            Some((text, t)) => {
                let tol = cfg.tolerance.unwrap_or(5.0 * e.se);
                row = row.check(text, fmt_real(tol), (e.mean - t).abs() <= tol);
            }
            None => row.tolerance = Some(format!("se {}", fmt_real(e.se))),
        }
        rows.push(row);
    }
    Ok(rows)
}

fn appendix(cfg: &ExperimentConfig) -> Result<Vec<Row>, LabError> {
    let max_m = cfg.max_m.unwrap_or(acceptance::APPENDIX_M);
    let reps = cfg.reps.unwrap_or(acceptance::APPENDIX_REPS);
    let seed = cfg.seed();
    let table = appendix_partial_sums(max_m, reps, seed)?;
    let mut rows: Vec<Row> = table
        .iter()
        .map(|r| {
            let mut row = Row::info("appendix-sums", format!("cumulative m={}", r.m), fmt_real(r.cumulative))
                .model(Model::Bst)
                .n(r.m);
            if !r.exact {
                row = row.sampled(reps, seed);
            }
            row.target = Some(format!("entropy {}", fmt_real(r.entropy)));
            row
        })
        .collect();
    if max_m >= 20 {
        let slope = appendix_slope(&table, 10, 25);
        let c = shape_entropy_constant(acceptance::ENTROPY_TERMS);
        let tol = cfg.tolerance.unwrap_or(0.25) * c;
        rows.push(
            Row::info("appendix-sums", "slope against log M", fmt_real(slope))
                .model(Model::Bst)
                .n(max_m)
                .sampled(reps, seed)
                .check(fmt_real(c), fmt_real(tol), (slope - c).abs() <= tol),
        );
    }
    Ok(rows)
}

fn suite(cfg: &ExperimentConfig) -> Result<Vec<Row>, LabError> {
    match cfg.suite.as_deref().unwrap_or("acceptance") {
        "acceptance" => {}
        other => return Err(LabError::Invalid(format!("unknown suite `{other}`"))),
    }
    let seed = cfg.seed();
    let mut rows = Vec::new();
    for c in acceptance::run_suite(seed) {
        eprintln!("{}", c.summary());
        rows.extend(c.rows);
    }
    Ok(rows)
}
