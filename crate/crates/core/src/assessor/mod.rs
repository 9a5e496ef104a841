//! Agent assessment: task issuance under a time budget, last-line label
//! parsing, failure classification, metrics and the evaluation artifact.

mod artifact;
mod retry;
mod run;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::datapipe::DatasetInstance;
use crate::fol::Label;
use crate::stats::{nearest_rank, percent};
use crate::transport::TaskMessage;

pub use artifact::{render_table, AgentIdentity, ArtifactError, DatasetIdentity, EvalArtifact, SCHEMA_VERSION};
pub use retry::{retry_with_feedback, RetryFailure, RetrySuccess};
pub use run::{assess_instance, run_benchmark, AgentTransport, BenchError, HttpAgent, RunContext, Tap};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("no label on the last line: {last_line:?}")]
pub struct ParseError {
    pub last_line: String,
}

fn strip_emphasis(s: &str) -> &str {
    let mut s = s.trim();
    loop {
        let t = s.trim_matches(|c| matches!(c, '*' | '_' | '`')).trim();
        if t == s {
            return s;
        }
        s = t;
    }
}

/// The label on the last non-empty line, ignoring surrounding markdown
/// emphasis and backticks, case-insensitively.
pub fn parse_label(response: &str) -> Result<Label, ParseError> {
    let last = response.lines().rev().find(|l| !l.trim().is_empty()).unwrap_or("");
    let word = strip_emphasis(last);
    Label::ALL
        .into_iter()
        .find(|l| l.as_str().eq_ignore_ascii_case(word))
        .ok_or_else(|| ParseError {
            last_line: last.trim().to_string(),
        })
}

/// One question as the assessor holds it. The gold label stays here.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskSpec {
    pub instance_id: String,
    pub premises_nl: Vec<String>,
    pub conclusion_nl: String,
    pub gold_label: Label,
}

impl TaskSpec {
    pub fn from_instance(inst: &DatasetInstance) -> Self {
        TaskSpec {
            instance_id: inst.id.clone(),
            premises_nl: inst.premises_nl.clone(),
            conclusion_nl: inst.conclusion_nl.clone(),
            gold_label: inst.expected_label,
        }
    }

    /// Wire message for the given attempt, task id `<instance>:<attempt>`.
    pub fn to_message(&self, attempt: u32) -> TaskMessage {
        TaskMessage::new(
            format!("{}:{attempt}", self.instance_id),
            self.premises_nl.clone(),
            self.conclusion_nl.clone(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssessBudget {
    pub timeout_ms: u64,
    /// Extra attempts after a transport or agent fault.
    pub max_retries: u32,
}

impl Default for AssessBudget {
    fn default() -> Self {
        AssessBudget {
            timeout_ms: 60_000,
            max_retries: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("timeout_ms must be positive")]
pub struct AssessBudgetError;

impl AssessBudget {
    pub fn new(timeout_ms: u64, max_retries: u32) -> Result<Self, AssessBudgetError> {
        if timeout_ms == 0 {
            return Err(AssessBudgetError);
        }
        Ok(AssessBudget { timeout_ms, max_retries })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FailureType {
    Timeout,
    RuntimeError,
    ParseError,
}

impl fmt::Display for FailureType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FailureType::Timeout => "Timeout",
            FailureType::RuntimeError => "RuntimeError",
            FailureType::ParseError => "ParseError",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub instance_id: String,
    pub gold: Label,
    pub predicted: Option<Label>,
    pub correct: bool,
    pub failure: Option<FailureType>,
    /// What went wrong, when `failure` is set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    /// From the first send to the final outcome, across retries.
    pub latency_ms: u64,
    pub attempts: u32,
    /// `sha256:<hex>` of the last response text (answer or agent error).
    pub raw_response_digest: Option<String>,
}

impl InstanceRecord {
    pub fn is_well_formed(&self) -> bool {
        self.predicted.is_some() != self.failure.is_some()
            && (!self.correct || self.predicted == Some(self.gold))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelMetrics {
    pub label: Label,
    pub correct: usize,
    pub total: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureCounts {
    #[serde(rename = "Timeout")]
    pub timeout: usize,
    #[serde(rename = "RuntimeError")]
    pub runtime_error: usize,
    #[serde(rename = "ParseError")]
    pub parse_error: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatencySummary {
    pub p50_ms: Option<u64>,
    pub p95_ms: Option<u64>,
}

/// Accuracies are percentages rounded half-up to two decimals. Failures
/// count as incorrect.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub total: usize,
    pub correct: usize,
    pub accuracy: f64,
    pub per_label: Vec<LabelMetrics>,
    pub failures: FailureCounts,
    pub latency: LatencySummary,
}

pub fn aggregate(records: &[InstanceRecord]) -> Metrics {
    let pct = |c: usize, t: usize| percent(c as u64, t as u64, 2);
    let correct = records.iter().filter(|r| r.correct).count();
    let per_label = Label::ALL
        .into_iter()
        .map(|label| {
            let slice: Vec<&InstanceRecord> = records.iter().filter(|r| r.gold == label).collect();
            let c = slice.iter().filter(|r| r.correct).count();
            LabelMetrics {
                label,
                correct: c,
                total: slice.len(),
                accuracy: pct(c, slice.len()),
            }
        })
        .collect();
    let mut failures = FailureCounts::default();
    for r in records {
        match r.failure {
            Some(FailureType::Timeout) => failures.timeout += 1,
            Some(FailureType::RuntimeError) => failures.runtime_error += 1,
            Some(FailureType::ParseError) => failures.parse_error += 1,
            None => {}
        }
    }
    let mut lat: Vec<u64> = records.iter().map(|r| r.latency_ms).collect();
    lat.sort_unstable();
    Metrics {
        total: records.len(),
        correct,
        accuracy: pct(correct, records.len()),
        per_label,
        failures,
        latency: LatencySummary {
            p50_ms: nearest_rank(&lat, 50),
            p95_ms: nearest_rank(&lat, 95),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn last_line_rule() {
        assert_eq!(parse_label("Step 1: ...\nStep 2: ...\nTrue"), Ok(Label::True));
        assert_eq!(parse_label("**Uncertain**"), Ok(Label::Uncertain));
        assert_eq!(parse_label("`false`\n\n  \n"), Ok(Label::False));
        assert_eq!(parse_label("_**TRUE**_"), Ok(Label::True));
        assert!(parse_label("The answer is True or False").is_err());
        assert!(parse_label("True.").is_err());
        assert!(parse_label("True\nbanana").is_err());
        assert_eq!(parse_label("").unwrap_err().last_line, "");
    }

    fn rec(id: usize, gold: Label, predicted: Option<Label>) -> InstanceRecord {
        InstanceRecord {
            instance_id: format!("{id:04}"),
            gold,
            predicted,
            correct: predicted == Some(gold),
            failure: predicted.is_none().then_some(FailureType::ParseError),
            detail: None,
            latency_ms: id as u64,
            attempts: 1,
            raw_response_digest: None,
        }
    }

    #[test]
    fn empty_aggregate_is_zeroed() {
        let m = aggregate(&[]);
        assert_eq!((m.total, m.correct, m.accuracy), (0, 0, 0.0));
        assert_eq!(m.latency, LatencySummary::default());
        assert!(m.per_label.iter().all(|l| l.total == 0 && l.accuracy == 0.0));
    }

    #[test]
    fn failures_count_as_incorrect() {
        let records = vec![
            rec(1, Label::True, Some(Label::True)),
            rec(2, Label::True, None),
            rec(3, Label::False, Some(Label::True)),
            rec(4, Label::Uncertain, Some(Label::Uncertain)),
        ];
        let m = aggregate(&records);
        assert_eq!(m.accuracy, 50.0);
        assert_eq!(m.per_label[0].accuracy, 50.0);
        assert_eq!(m.per_label[1].accuracy, 0.0);
        assert_eq!(m.failures.parse_error, 1);
        assert_eq!(m.latency.p50_ms, Some(2));
        assert!(records.iter().all(InstanceRecord::is_well_formed));
    }

    #[test]
    fn gold_is_not_in_the_message() {
        let t = TaskSpec {
            instance_id: "q1".into(),
            premises_nl: vec!["Rex is a dog.".into()],
            conclusion_nl: "Rex barks.".into(),
            gold_label: Label::Uncertain,
        };
        let mut msg = t.to_message(1);
        assert_eq!(msg.task_id, "q1:1");
        // The fixed answer contract names every label; nothing else may.
        msg.instructions.clear();
        assert!(!serde_json::to_string(&msg).unwrap().contains("Uncertain"));
        let flipped = TaskSpec {
            gold_label: Label::True,
            ..t.clone()
        };
        assert_eq!(flipped.to_message(1), t.to_message(1));
    }
}
