//! Experiment reports: one row per checked quantity, emitted as JSON or CSV
//! with identical values.

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::LabError;

/// Stand-in for `git describe`; release builds may override it through the
/// `FRINGE_GIT_DESCRIBE` environment variable at compile time.
pub const GIT_DESCRIBE: &str = match option_env!("FRINGE_GIT_DESCRIBE") {
    Some(v) => v,
    None => concat!("v", env!("CARGO_PKG_VERSION"), "-unknown"),
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    /// Reported without a target.
    Info,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Info => "INFO",
        })
    }
}

/// One reported quantity. Exact values are `p/q` strings, reals carry 12
/// significant digits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub experiment: String,
    pub statistic: String,
    pub model: String,
    pub n: Option<u64>,
    pub reps: Option<u64>,
    pub seed: Option<u64>,
    pub estimate: String,
    pub target: Option<String>,
    pub tolerance: Option<String>,
    pub verdict: Verdict,
}

impl Row {
    pub fn info(experiment: &str, statistic: impl Into<String>, estimate: impl Into<String>) -> Self {
        Row {
            experiment: experiment.into(),
            statistic: statistic.into(),
            model: String::new(),
            n: None,
            reps: None,
            seed: None,
            estimate: estimate.into(),
            target: None,
            tolerance: None,
            verdict: Verdict::Info,
        }
    }

    pub fn model(mut self, model: impl fmt::Display) -> Self {
        self.model = model.to_string();
        self
    }

    pub fn n(mut self, n: usize) -> Self {
        self.n = Some(n as u64);
        self
    }

    pub fn sampled(mut self, reps: u64, seed: u64) -> Self {
        self.reps = Some(reps);
        self.seed = Some(seed);
        self
    }

    /// Attaches a target and a verdict.
    pub fn check(mut self, target: impl Into<String>, tolerance: impl Into<String>, ok: bool) -> Self {
        self.target = Some(target.into());
        self.tolerance = Some(tolerance.into());
        self.verdict = Verdict::from_bool(ok);
        self
    }
}

/// Output format of the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    /// Aligned columns for reading.
    #[default]
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub config: serde_json::Value,
    pub config_hash: String,
    pub version: String,
    pub rows: Vec<Row>,
    /// Command-specific payload (exact laws, pmfs, tables); JSON only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<serde_json::Value>,
}

/// FNV-1a over the canonical config JSON.
pub fn config_hash(config: &serde_json::Value) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in config.to_string().bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    format!("{h:016x}")
}

impl Report {
    pub fn new(command: &str, config: serde_json::Value, rows: Vec<Row>) -> Self {
        Report {
            command: command.into(),
            config_hash: config_hash(&config),
            config,
            version: GIT_DESCRIBE.into(),
            rows,
            details: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.verdict != Verdict::Fail)
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> Result<(), LabError> {
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, self)?;
                writeln!(out)?;
            }
            Format::Csv => self.write_csv(out)?,
            Format::Text => self.write_text(out)?,
        }
        Ok(())
    }

    fn write_csv(&self, out: &mut dyn Write) -> Result<(), LabError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "experiment",
            "statistic",
            "model",
            "n",
            "reps",
            "seed",
            "estimate",
            "target",
            "tolerance",
            "verdict",
            "config_hash",
            "version",
        ])?;
        let opt = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
        for r in &self.rows {
            w.write_record([
                r.experiment.as_str(),
                &r.statistic,
                &r.model,
                &opt(r.n),
                &opt(r.reps),
                &opt(r.seed),
                &r.estimate,
                r.target.as_deref().unwrap_or(""),
                r.tolerance.as_deref().unwrap_or(""),
                &r.verdict.to_string(),
                &self.config_hash,
                &self.version,
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    fn write_text(&self, out: &mut dyn Write) -> Result<(), LabError> {
        for r in &self.rows {
            let mut line = format!("{:<5} {}", r.verdict, r.experiment);
            if !r.model.is_empty() {
                line += &format!(" {}", r.model);
            }
            line += &format!(" {}", r.statistic);
            if let Some(n) = r.n {
                line += &format!(" n={n}");
            }
            line += &format!(" = {}", r.estimate);
            if let Some(t) = &r.target {
                line += &format!("  target {t}");
            }
            if let Some(t) = &r.tolerance {
                line += &format!(" tol {t}");
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let rows = vec![
            Row::info("exact", "var-count(1)", "22/45").model("bst").n(10),
            Row::info("simulate", "count(1)", "3.3").sampled(10, 42).check("3.33", "0.1", true),
        ];
        Report::new("exact", serde_json::json!({"model": "bst"}), rows)
    }

    #[test]
    fn csv_and_json_agree() {
        let r = sample();
        let mut j = Vec::new();
        r.write(Format::Json, &mut j).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&j).unwrap();
        let mut c = Vec::new();
        r.write(Format::Csv, &mut c).unwrap();
        let mut rdr = csv::Reader::from_reader(c.as_slice());
        for (rec, row) in rdr.records().zip(v["rows"].as_array().unwrap()) {
            let rec = rec.unwrap();
            assert_eq!(&rec[6], row["estimate"].as_str().unwrap());
            assert_eq!(&rec[9], row["verdict"].as_str().unwrap());
            assert_eq!(&rec[10], v["config_hash"].as_str().unwrap());
        }
        assert!(r.passed());
    }

    #[test]
    fn hash_is_stable() {
        let a = config_hash(&serde_json::json!({"seed": 42}));
        assert_eq!(a, config_hash(&serde_json::json!({"seed": 42})));
        assert_ne!(a, config_hash(&serde_json::json!({"seed": 43})));
    }
}
