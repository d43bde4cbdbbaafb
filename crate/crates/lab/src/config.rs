//! Experiment configuration: command-line flags over a JSON file over
//! defaults.

use std::path::{Path, PathBuf};

use clap::Args;
use fringe_core::stat::Stat;
use fringe_core::trees::{Property, Toll, TreeKey, TreeMode};
use fringe_core::Model;
use serde::{Deserialize, Serialize};

use crate::oracle::ORACLE_CAP;
use crate::report::Format;
use crate::LabError;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_REPS: u64 = 10_000;
pub const DEFAULT_DRAWS: u64 = 1_000_000;

/// Selectors shared by all subcommands. Every field is optional so a JSON
/// config file can fill what the flags leave out.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct ExperimentConfig {
    /// Tree model: bst or rrt.
    #[arg(long)]
    pub model: Option<String>,
    /// Tree size; a comma-separated list runs each size.
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,
    /// Fringe size.
    #[arg(long)]
    pub k: Option<usize>,
    /// Second fringe size.
    #[arg(long)]
    pub m: Option<usize>,
    /// Window start for coupling checks (all windows when absent).
    #[arg(long)]
    pub i: Option<usize>,
    /// Statistic; repeat for several. Either a full form such as
    /// `count(3)` or a bare name completed by --k/--tree/--property/--l/--d/--toll.
    #[arg(long)]
    pub stat: Vec<String>,
    /// Tree key, `mode:text` or bare text (binary for bst, ordered for rrt).
    #[arg(long)]
    pub tree: Option<String>,
    /// Second tree key.
    #[arg(long)]
    pub tree2: Option<String>,
    /// Fringe property, e.g. cherry or right-path.
    #[arg(long)]
    pub property: Option<String>,
    /// Protection level.
    #[arg(long)]
    pub l: Option<usize>,
    /// Outdegree.
    #[arg(long)]
    pub d: Option<usize>,
    /// Toll function, e.g. log-size or leaf-protected-combo.
    #[arg(long)]
    pub toll: Option<String>,
    /// Monte Carlo replicates.
    #[arg(long)]
    pub reps: Option<u64>,
    /// Master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Limit-fringe draws.
    #[arg(long)]
    pub draws: Option<u64>,
    /// Largest m for appendix sums.
    #[arg(long)]
    pub max_m: Option<usize>,
    /// Poisson parameter (default: exact mean).
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Centering for KS: exact or limit.
    #[arg(long)]
    pub center: Option<String>,
    /// Tolerance turning a reported value into a verdict.
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Enumeration cap; may only lower the built-in cap.
    #[arg(long)]
    pub cap: Option<usize>,
    /// Suite name for `report`.
    #[arg(long)]
    pub suite: Option<String>,
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self, LabError> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| LabError::Invalid(format!("config {}: {e}", path.display())))
    }

    /// Fields set in `self` win over `base`.
    pub fn over(self, base: ExperimentConfig) -> ExperimentConfig {
        macro_rules! pick {
            ($($f:ident),*) => {
                ExperimentConfig { $($f: self.$f.or(base.$f),)* n: if self.n.is_empty() { base.n } else { self.n }, stat: if self.stat.is_empty() { base.stat } else { self.stat } }
            };
        }
        pick!(model, k, m, i, tree, tree2, property, l, d, toll, reps, seed, draws, max_m, lambda, center, tolerance, cap, suite)
    }

    pub fn model(&self) -> Result<Model, LabError> {
        let m = self.model.as_deref().unwrap_or("bst");
        Ok(m.parse::<Model>()?)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn reps(&self) -> Result<u64, LabError> {
        match self.reps.unwrap_or(DEFAULT_REPS) {
            0 => Err(LabError::Invalid("--reps must be positive".into())),
            r => Ok(r),
        }
    }

    pub fn sizes(&self) -> Result<Vec<usize>, LabError> {
        if self.n.is_empty() {
            return Err(LabError::Invalid("--n is required".into()));
        }
        if self.n.contains(&0) {
            return Err(LabError::Invalid("--n must be positive".into()));
        }
        Ok(self.n.clone())
    }

    pub fn k(&self) -> Result<usize, LabError> {
        self.k.ok_or_else(|| LabError::Invalid("--k is required".into()))
    }

    /// Enumeration cap after applying a downward override.
    pub fn cap(&self) -> Result<usize, LabError> {
        match self.cap {
            None => Ok(ORACLE_CAP),
            Some(c) if c <= ORACLE_CAP => Ok(c),
            Some(c) => Err(LabError::Invalid(format!("--cap {c} exceeds the built-in cap {ORACLE_CAP}"))),
        }
    }

    pub fn tree_key(&self, text: Option<&str>, model: Model) -> Result<TreeKey, LabError> {
        let text = text.ok_or_else(|| LabError::Invalid("--tree is required".into()))?;
        parse_key(text, model)
    }

    pub fn property(&self) -> Result<Property, LabError> {
        let p = self.property.as_deref().ok_or_else(|| LabError::Invalid("--property is required".into()))?;
        Ok(p.parse::<Property>()?)
    }

    pub fn toll(&self) -> Result<Toll, LabError> {
        let t = self.toll.as_deref().ok_or_else(|| LabError::Invalid("--toll is required".into()))?;
        Ok(t.parse::<Toll>()?)
    }

    /// Statistics named by `--stat`, completed by the selector flags.
    pub fn stats(&self, model: Model) -> Result<Vec<Stat>, LabError> {
        if self.stat.is_empty() {
            return Err(LabError::Invalid("--stat is required".into()));
        }
        self.stat.iter().map(|s| self.resolve_stat(s, model)).collect()
    }

    fn resolve_stat(&self, s: &str, model: Model) -> Result<Stat, LabError> {
        let need = |v: Option<usize>, flag: &str| v.ok_or_else(|| LabError::Invalid(format!("--stat {s} needs --{flag}")));
        Ok(match s.trim() {
            "count" => Stat::Count(need(self.k, "k")?),
            "tree" => Stat::TreeCount(self.tree_key(self.tree.as_deref(), model)?),
            "property" => Stat::PropertyCount {
                k: need(self.k, "k")?,
                property: self.property()?,
            },
            "protected" => Stat::Protected(need(self.l, "l")?),
            "outdegree" => Stat::Outdegree(need(self.d, "d")?),
            "additive" => Stat::Additive(self.toll()?),
            other if other.starts_with("tree(") && !other.contains(':') => {
                let inner = &other[5..other.len() - 1];
                Stat::TreeCount(parse_key(inner, model)?)
            }
            other => other.parse::<Stat>()?,
        })
    }

    /// JSON form recorded in every report.
    pub fn to_json(&self, command: &str) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("plain data");
        if let serde_json::Value::Object(m) = &mut v {
            m.retain(|_, x| !(x.is_null() || x.as_array().is_some_and(|a| a.is_empty())));
            m.insert("command".into(), command.into());
        }
        v
    }
}

/// Tree key text with an optional `mode:` prefix; the default mode is the
/// model's shape mode.
pub fn parse_key(text: &str, model: Model) -> Result<TreeKey, LabError> {
    let (mode, body) = match text.split_once(':') {
        Some((m, b)) => (m.trim().parse::<TreeMode>()?, b.trim()),
        None => (fringe_core::exact::shape_mode(model), text.trim()),
    };
    Ok(TreeKey::parse(mode, body)?)
}

/// Global flags.
#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// Worker threads (default: machine parallelism). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// JSON config file; flags take precedence over it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let file: ExperimentConfig = serde_json::from_str(r#"{"model":"rrt","n":[7],"seed":5,"stat":["count"]}"#).unwrap();
        let flags = ExperimentConfig {
            seed: Some(9),
            k: Some(2),
            ..Default::default()
        };
        let c = flags.over(file);
        assert_eq!(c.model().unwrap(), Model::Rrt);
        assert_eq!(c.seed(), 9);
        assert_eq!(c.sizes().unwrap(), vec![7]);
        assert_eq!(c.stats(Model::Rrt).unwrap(), vec![Stat::Count(2)]);
        assert_eq!(ExperimentConfig::default().seed(), DEFAULT_SEED);
    }

    #[test]
    fn stat_completion_and_caps() {
        let c = ExperimentConfig {
            stat: vec!["property".into(), "tree(((..)(..)))".into(), "leaves".into()],
            k: Some(3),
            property: Some("cherry".into()),
            ..Default::default()
        };
        let s = c.stats(Model::Bst).unwrap();
        assert_eq!(s[0], Stat::PropertyCount { k: 3, property: Property::Cherry });
        assert!(matches!(&s[1], Stat::TreeCount(key) if key.size() == 3));
        assert_eq!(s[2], Stat::Count(1));
        let bad = ExperimentConfig { cap: Some(11), ..Default::default() };
        assert!(bad.cap().is_err());
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"bogus":1}"#).is_err());
    }
}
