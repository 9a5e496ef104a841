//! Minimal JSON-over-HTTP task protocol between an assessor and an agent
//! under test: one `POST /task` exchange per task plus `GET /card`.

pub mod agents;
mod client;
mod server;

use serde::{Deserialize, Serialize};

pub use client::{send_task, Client, TransportError};
pub use server::{serve_agent, Agent, BindError, Handler, ServerHandle};

pub const PROTOCOL: &str = "ab-mini/1";
pub const TASK_KIND: &str = "fol_inference";

/// The answer-format contract sent with every task.
pub const LABEL_INSTRUCTIONS: &str = "Decide whether the conclusion follows from the premises. \
Reason however you like, then end your answer with a final line containing exactly one of: True, False, Uncertain.";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskMessage {
    pub protocol: String,
    pub task_id: String,
    pub kind: String,
    pub premises: Vec<String>,
    pub conclusion: String,
    pub instructions: String,
}

impl TaskMessage {
    pub fn new(task_id: impl Into<String>, premises: Vec<String>, conclusion: impl Into<String>) -> Self {
        TaskMessage {
            protocol: PROTOCOL.into(),
            task_id: task_id.into(),
            kind: TASK_KIND.into(),
            premises,
            conclusion: conclusion.into(),
            instructions: LABEL_INSTRUCTIONS.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskStatus {
    Completed,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskResponse {
    pub protocol: String,
    pub task_id: String,
    pub status: TaskStatus,
    #[serde(default)]
    pub content: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl TaskResponse {
    pub fn completed(task_id: impl Into<String>, content: impl Into<String>) -> Self {
        TaskResponse {
            protocol: PROTOCOL.into(),
            task_id: task_id.into(),
            status: TaskStatus::Completed,
            content: content.into(),
            error: None,
        }
    }

    pub fn failed(task_id: impl Into<String>, error: impl Into<String>) -> Self {
        let mut error = error.into();
        if error.is_empty() {
            error = "agent failed without a message".into();
        }
        TaskResponse {
            protocol: PROTOCOL.into(),
            task_id: task_id.into(),
            status: TaskStatus::Failed,
            content: String::new(),
            error: Some(error),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentCard {
    pub name: String,
    pub version: String,
    pub capabilities: Vec<String>,
}

impl AgentCard {
    pub fn new(name: impl Into<String>) -> Self {
        AgentCard {
            name: name.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            capabilities: vec![TASK_KIND.into()],
        }
    }
}
