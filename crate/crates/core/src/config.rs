//! Flat `key = value` configuration. Blank lines and `#` comments are
//! ignored; an empty file is a valid, fully defaulted config.
//!
//! | key                    | default        |
//! |------------------------|----------------|
//! | `budget.max_clauses`   | 50000          |
//! | `budget.max_iterations`| 100000         |
//! | `budget.timeout_ms`    | 60000          |
//! | `clean.max_iters`      | 3              |
//! | `clean.workers`        | available cores|
//! | `field.id` ... `field.label` | FOLIO keys |
//! | `assess.timeout_ms`    | 60000          |
//! | `assess.retries`       | 0              |
//! | `assess.concurrency`   | 4              |
//! | `output.artifact`, `output.clean`, `output.report` | unset |
//! | `prover.external`      | unset          |

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use crate::assessor::AssessBudget;
use crate::datapipe::{FieldMap, DEFAULT_MAX_ITERS};
use crate::prover::Budget;

pub const CONFIG_ENV: &str = "ENTAILBENCH_CONFIG";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    pub budget: Budget,
    pub max_iters: usize,
    pub workers: usize,
    pub fields: FieldMap,
    pub assess: AssessBudget,
    pub concurrency: usize,
    pub artifact_out: Option<PathBuf>,
    pub clean_out: Option<PathBuf>,
    pub report_out: Option<PathBuf>,
    pub external_prover: Option<PathBuf>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            budget: Budget::default(),
            max_iters: DEFAULT_MAX_ITERS,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            fields: FieldMap::default(),
            assess: AssessBudget::default(),
            concurrency: 4,
            artifact_out: None,
            clean_out: None,
            report_out: None,
            external_prover: None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("config line {line}: {message}")]
    Line { line: usize, message: String },
}

fn positive<T: FromStr + PartialOrd + Default>(v: &str) -> Result<T, String> {
    match v.parse::<T>() {
        Ok(n) if n > T::default() => Ok(n),
        _ => Err(format!("expected a positive integer, got {v:?}")),
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Config::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| ConfigError::Line { line: i + 1, message };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, got {line:?}")))?;
            cfg.set(key.trim(), value.trim()).map_err(err)?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    /// `explicit` if given, else the file named by `ENTAILBENCH_CONFIG`,
    /// else defaults.
    pub fn resolve(explicit: Option<&Path>) -> Result<Self, ConfigError> {
        match explicit {
            Some(p) => Self::load(p),
            None => match std::env::var_os(CONFIG_ENV) {
                Some(p) if !p.is_empty() => Self::load(Path::new(&p)),
                _ => Ok(Self::default()),
            },
        }
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let path = || Some(PathBuf::from(value));
        match key {
            "budget.max_clauses" => self.budget.max_clauses = positive(value)?,
            "budget.max_iterations" => self.budget.max_iterations = positive(value)?,
            "budget.timeout_ms" => self.budget.wall_timeout = Duration::from_millis(positive(value)?),
            "clean.max_iters" => self.max_iters = positive(value)?,
            "clean.workers" => self.workers = positive(value)?,
            "field.id" => self.fields.id = value.into(),
            "field.premises" => self.fields.premises_nl = value.into(),
            "field.premises_fol" => self.fields.premises_fol = value.into(),
            "field.conclusion" => self.fields.conclusion_nl = value.into(),
            "field.conclusion_fol" => self.fields.conclusion_fol = value.into(),
            "field.label" => self.fields.label = value.into(),
            "assess.timeout_ms" => self.assess.timeout_ms = positive(value)?,
            "assess.retries" => {
                self.assess.max_retries = value
                    .parse()
                    .map_err(|_| format!("expected a non-negative integer, got {value:?}"))?
            }
            "assess.concurrency" => self.concurrency = positive(value)?,
            "output.artifact" => self.artifact_out = path(),
            "output.clean" => self.clean_out = path(),
            "output.report" => self.report_out = path(),
            "prover.external" => self.external_prover = path(),
            other => return Err(format!("unknown key {other:?}")),
        }
        Ok(())
    }

    /// Every key with its resolved value, as embedded in artifacts.
    pub fn snapshot(&self) -> BTreeMap<String, String> {
        let opt = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
        let pairs: [(&str, String); 18] = [
            ("budget.max_clauses", self.budget.max_clauses.to_string()),
            ("budget.max_iterations", self.budget.max_iterations.to_string()),
            ("budget.timeout_ms", self.budget.wall_timeout.as_millis().to_string()),
            ("clean.max_iters", self.max_iters.to_string()),
            ("clean.workers", self.workers.to_string()),
            ("field.id", self.fields.id.clone()),
            ("field.premises", self.fields.premises_nl.clone()),
            ("field.premises_fol", self.fields.premises_fol.clone()),
            ("field.conclusion", self.fields.conclusion_nl.clone()),
            ("field.conclusion_fol", self.fields.conclusion_fol.clone()),
            ("field.label", self.fields.label.clone()),
            ("assess.timeout_ms", self.assess.timeout_ms.to_string()),
            ("assess.retries", self.assess.max_retries.to_string()),
            ("assess.concurrency", self.concurrency.to_string()),
            ("output.artifact", opt(&self.artifact_out)),
            ("output.clean", opt(&self.clean_out)),
            ("output.report", opt(&self.report_out)),
            ("prover.external", opt(&self.external_prover)),
        ];
        pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_is_default() {
        assert_eq!(Config::parse("").unwrap(), Config::default());
        assert_eq!(Config::parse("# nothing\n\n").unwrap(), Config::default());
    }

    #[test]
    fn values_and_errors() {
        let cfg = Config::parse("budget.timeout_ms = 500\nfield.label=answer\nassess.retries = 0\n").unwrap();
        assert_eq!(cfg.budget.wall_timeout, Duration::from_millis(500));
        assert_eq!(cfg.fields.label, "answer");
        let e = Config::parse("\nbudget.timeout_ms = 0").unwrap_err().to_string();
        assert!(e.contains("line 2"), "{e}");
        assert!(Config::parse("no.such = 1").is_err());
        assert!(Config::parse("just words").is_err());
    }

    #[test]
    fn snapshot_round_trips() {
        let mut cfg = Config::default();
        cfg.set("output.artifact", "/tmp/a.json").unwrap();
        cfg.set("clean.max_iters", "5").unwrap();
        let text: String = cfg
            .snapshot()
            .into_iter()
            .filter(|(_, v)| !v.is_empty())
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect();
        assert_eq!(Config::parse(&text).unwrap(), cfg);
    }
}
