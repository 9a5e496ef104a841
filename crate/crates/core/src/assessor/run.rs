use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use async_trait::async_trait;
use futures::stream::{self, StreamExt};
use sha2::{Digest, Sha256};

use super::artifact::{AgentIdentity, DatasetIdentity, EvalArtifact, SCHEMA_VERSION};
use super::{aggregate, parse_label, AssessBudget, FailureType, InstanceRecord, TaskSpec};
use crate::transport::{Client, TaskMessage, TaskResponse, TaskStatus, TransportError};

/// How the assessor reaches an agent.
#[async_trait]
pub trait AgentTransport: Send + Sync {
    async fn send(&self, msg: &TaskMessage, deadline: Duration) -> Result<TaskResponse, TransportError>;
}

/// An agent behind an HTTP endpoint.
#[derive(Debug, Clone)]
pub struct HttpAgent {
    pub endpoint: String,
    client: Client,
}

impl HttpAgent {
    pub fn new(endpoint: impl Into<String>) -> Self {
        HttpAgent {
            endpoint: endpoint.into(),
            client: Client::new(),
        }
    }
}

#[async_trait]
impl AgentTransport for HttpAgent {
    async fn send(&self, msg: &TaskMessage, deadline: Duration) -> Result<TaskResponse, TransportError> {
        self.client.send_task(&self.endpoint, msg, deadline).await
    }
}

/// Records every outbound message exactly as serialized for the wire.
#[derive(Debug)]
pub struct Tap<T> {
    inner: T,
    sent: Mutex<Vec<String>>,
}

impl<T> Tap<T> {
    pub fn new(inner: T) -> Self {
        Tap {
            inner,
            sent: Mutex::new(Vec::new()),
        }
    }

    pub fn sent(&self) -> Vec<String> {
        self.sent.lock().expect("tap lock").clone()
    }
}

#[async_trait]
impl<T: AgentTransport> AgentTransport for Tap<T> {
    async fn send(&self, msg: &TaskMessage, deadline: Duration) -> Result<TaskResponse, TransportError> {
        let wire = serde_json::to_string(msg).expect("task messages serialize");
        self.sent.lock().expect("tap lock").push(wire);
        self.inner.send(msg, deadline).await
    }
}

fn digest(text: &str) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(text.as_bytes())))
}

/// Sends one task, retrying only transport and agent faults. Never fails:
/// every path ends in a record.
pub async fn assess_instance(agent: &dyn AgentTransport, task: &TaskSpec, budget: &AssessBudget) -> InstanceRecord {
    let start = Instant::now();
    let deadline = Duration::from_millis(budget.timeout_ms);
    let mut attempts = 0;
    let record = |predicted, failure, detail, attempts, raw: Option<&str>| InstanceRecord {
        instance_id: task.instance_id.clone(),
        gold: task.gold_label,
        predicted,
        correct: predicted == Some(task.gold_label),
        failure,
        detail,
        latency_ms: start.elapsed().as_millis() as u64,
        attempts,
        raw_response_digest: raw.map(digest),
    };
    loop {
        attempts += 1;
        let msg = task.to_message(attempts);
        let outcome = tokio::time::timeout(deadline, agent.send(&msg, deadline))
            .await
            .unwrap_or(Err(TransportError::DeadlineExceeded));
        let (detail, raw) = match outcome {
            Err(TransportError::DeadlineExceeded) => {
                let detail = format!("no answer within {} ms", budget.timeout_ms);
                return record(None, Some(FailureType::Timeout), Some(detail), attempts, None);
            }
            Err(e) => (e.to_string(), None),
            Ok(resp) if resp.status == TaskStatus::Failed => {
                let err = resp.error.unwrap_or_default();
                (format!("agent failed: {err}"), Some(err))
            }
            Ok(resp) => {
                return match parse_label(&resp.content) {
                    Ok(label) => record(Some(label), None, None, attempts, Some(&resp.content)),
                    Err(e) => record(
                        None,
                        Some(FailureType::ParseError),
                        Some(e.to_string()),
                        attempts,
                        Some(&resp.content),
                    ),
                };
            }
        };
        if attempts > budget.max_retries {
            return record(None, Some(FailureType::RuntimeError), Some(detail), attempts, raw.as_deref());
        }
        log::debug!("{}: attempt {attempts} failed ({detail}), retrying", task.instance_id);
    }
}

/// Identity and output settings for one run.
#[derive(Debug, Clone, Default)]
pub struct RunContext {
    pub agent: AgentIdentity,
    pub dataset: DatasetIdentity,
    /// Resolved configuration, embedded verbatim.
    pub config: BTreeMap<String, String>,
    pub output: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("no tasks to assess")]
    NoTasks,
    #[error("concurrency must be at least 1")]
    BadConcurrency,
    #[error("instance id {0:?} appears more than once")]
    DuplicateInstance(String),
    #[error("cannot write artifact to {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Assesses every task with up to `concurrency` in flight, aggregates after
/// all finish, and writes the artifact when `ctx.output` is set.
pub async fn run_benchmark(
    tasks: &[TaskSpec],
    agent: &dyn AgentTransport,
    budget: &AssessBudget,
    concurrency: usize,
    ctx: &RunContext,
) -> Result<EvalArtifact, BenchError> {
    if tasks.is_empty() {
        return Err(BenchError::NoTasks);
    }
    if concurrency == 0 {
        return Err(BenchError::BadConcurrency);
    }
    let mut ids = BTreeSet::new();
    for t in tasks {
        if !ids.insert(t.instance_id.as_str()) {
            return Err(BenchError::DuplicateInstance(t.instance_id.clone()));
        }
    }
    let started_at = chrono::Utc::now().to_rfc3339();
    let mut records: Vec<InstanceRecord> = stream::iter(tasks)
        .map(|t| assess_instance(agent, t, budget))
        .buffer_unordered(concurrency)
        .collect()
        .await;
    records.sort_by(|a, b| a.instance_id.cmp(&b.instance_id));
    let metrics = aggregate(&records);
    let artifact = EvalArtifact {
        schema_version: SCHEMA_VERSION,
        run_id: uuid::Uuid::new_v4().to_string(),
        agent: ctx.agent.clone(),
        dataset: ctx.dataset.clone(),
        config: ctx.config.clone(),
        budget: *budget,
        records,
        metrics,
        started_at,
        finished_at: chrono::Utc::now().to_rfc3339(),
    };
    if let Some(path) = &ctx.output {
        artifact.write(path).map_err(|source| BenchError::Write {
            path: path.clone(),
            source,
        })?;
    }
    Ok(artifact)
}
