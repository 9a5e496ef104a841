use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use super::{aggregate, AssessBudget, InstanceRecord, Metrics, TaskSpec};
use crate::stats::format_percent;
use crate::transport::AgentCard;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentIdentity {
    pub endpoint: String,
    pub card: Option<AgentCard>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetIdentity {
    pub name: String,
    pub instances: usize,
    /// `sha256:<hex>` of the dataset content.
    pub digest: String,
}

impl DatasetIdentity {
    pub fn from_bytes(name: impl Into<String>, instances: usize, bytes: &[u8]) -> Self {
        DatasetIdentity {
            name: name.into(),
            instances,
            digest: format!("sha256:{}", hex::encode(Sha256::digest(bytes))),
        }
    }

    /// Digest over a canonical rendering of the tasks, gold labels included.
    pub fn of_tasks(name: impl Into<String>, tasks: &[TaskSpec]) -> Self {
        let mut canon = String::new();
        for t in tasks {
            let line = serde_json::json!([t.instance_id, t.premises_nl, t.conclusion_nl, t.gold_label.as_str()]);
            canon.push_str(&line.to_string());
            canon.push('\n');
        }
        Self::from_bytes(name, tasks.len(), canon.as_bytes())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalArtifact {
    pub schema_version: u32,
    pub run_id: String,
    pub agent: AgentIdentity,
    pub dataset: DatasetIdentity,
    pub config: BTreeMap<String, String>,
    pub budget: AssessBudget,
    pub records: Vec<InstanceRecord>,
    pub metrics: Metrics,
    pub started_at: String,
    pub finished_at: String,
}

#[derive(Debug, thiserror::Error)]
pub enum ArtifactError {
    #[error("cannot read artifact: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed artifact: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported artifact schema version {0}")]
    Schema(u32),
}

impl EvalArtifact {
    pub fn load(path: &Path) -> Result<Self, ArtifactError> {
        let text = std::fs::read_to_string(path)?;
        let artifact: EvalArtifact = serde_json::from_str(&text)?;
        if artifact.schema_version != SCHEMA_VERSION {
            return Err(ArtifactError::Schema(artifact.schema_version));
        }
        Ok(artifact)
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        let mut text = serde_json::to_string_pretty(self).map_err(std::io::Error::other)?;
        text.push('\n');
        std::fs::write(path, text)
    }

    /// True when the stored metrics equal a fresh aggregate of the records,
    /// compared as serialized JSON.
    pub fn metrics_consistent(&self) -> bool {
        serde_json::to_string(&aggregate(&self.records)).ok() == serde_json::to_string(&self.metrics).ok()
    }

    /// The artifact as JSON without run id, timestamps, latency fields or
    /// the concurrency setting, for comparing runs.
    pub fn normalized(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("artifacts serialize");
        let obj = v.as_object_mut().expect("object");
        for key in ["run_id", "started_at", "finished_at"] {
            obj.remove(key);
        }
        if let Some(Value::Object(config)) = obj.get_mut("config") {
            config.remove("assess.concurrency");
        }
        if let Some(Value::Array(records)) = obj.get_mut("records") {
            for r in records {
                r.as_object_mut().map(|r| r.remove("latency_ms"));
            }
        }
        if let Some(m) = obj.get_mut("metrics").and_then(Value::as_object_mut) {
            m.remove("latency");
        }
        v
    }
}

/// Per-label and overall accuracy table with failure and latency lines.
pub fn render_table(a: &EvalArtifact) -> String {
    let m = &a.metrics;
    let mut out = String::new();
    let _ = writeln!(out, "{:<10} {:>7} {:>6} {:>9}", "Category", "Correct", "Total", "Accuracy");
    for l in &m.per_label {
        let _ = writeln!(
            out,
            "{:<10} {:>7} {:>6} {:>9}",
            l.label.as_str(),
            l.correct,
            l.total,
            format_percent(l.accuracy, 2)
        );
    }
    let _ = writeln!(
        out,
        "{:<10} {:>7} {:>6} {:>9}",
        "Overall",
        m.correct,
        m.total,
        format_percent(m.accuracy, 2)
    );
    let f = &m.failures;
    let _ = writeln!(
        out,
        "Failures: Timeout {}, RuntimeError {}, ParseError {}",
        f.timeout, f.runtime_error, f.parse_error
    );
    let ms = |v: Option<u64>| v.map_or("-".to_string(), |v| format!("{v} ms"));
    let _ = writeln!(out, "Latency: p50 {}, p95 {}", ms(m.latency.p50_ms), ms(m.latency.p95_ms));
    out
}
