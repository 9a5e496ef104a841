use std::time::Duration;

use super::{AgentCard, TaskMessage, TaskResponse, TaskStatus};

/// Every way a single exchange can fail short of a response.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransportError {
    #[error("deadline exceeded")]
    DeadlineExceeded,
    #[error("connection fault: {0}")]
    ConnectionFault(String),
    #[error("protocol fault: {0}")]
    ProtocolFault(String),
}

/// HTTP client for agent endpoints. Cheap to clone; safe to share across
/// concurrent tasks.
#[derive(Debug, Clone, Default)]
pub struct Client {
    http: reqwest::Client,
}

fn join(base: &str, path: &str) -> String {
    format!("{}/{path}", base.trim_end_matches('/'))
}

fn classify(e: reqwest::Error) -> TransportError {
    if e.is_timeout() {
        TransportError::DeadlineExceeded
    } else if e.is_decode() {
        TransportError::ProtocolFault(e.to_string())
    } else {
        TransportError::ConnectionFault(e.to_string())
    }
}

impl Client {
    pub fn new() -> Self {
        Self::default()
    }

    /// `POST {endpoint}/task`. The deadline covers connect, send and the
    /// full response body.
    pub async fn send_task(
        &self,
        endpoint: &str,
        msg: &TaskMessage,
        deadline: Duration,
    ) -> Result<TaskResponse, TransportError> {
        let exchange = async {
            let resp = self
                .http
                .post(join(endpoint, "task"))
                .timeout(deadline)
                .json(msg)
                .send()
                .await
                .map_err(classify)?;
            let status = resp.status();
            let body = resp.bytes().await.map_err(classify)?;
            if !status.is_success() {
                return Err(TransportError::ProtocolFault(format!(
                    "HTTP {status}: {}",
                    String::from_utf8_lossy(&body).chars().take(200).collect::<String>()
                )));
            }
            let parsed: TaskResponse = serde_json::from_slice(&body)
                .map_err(|e| TransportError::ProtocolFault(format!("malformed response: {e}")))?;
            if parsed.task_id != msg.task_id {
                return Err(TransportError::ProtocolFault(format!(
                    "task_id mismatch: sent {}, got {}",
                    msg.task_id, parsed.task_id
                )));
            }
            if parsed.status == TaskStatus::Failed && parsed.error.as_deref().unwrap_or("").is_empty() {
                return Err(TransportError::ProtocolFault("failed response without an error".into()));
            }
            Ok(parsed)
        };
        tokio::time::timeout(deadline, exchange)
            .await
            .unwrap_or(Err(TransportError::DeadlineExceeded))
    }

    pub async fn fetch_card(&self, endpoint: &str, deadline: Duration) -> Result<AgentCard, TransportError> {
        let exchange = async {
            let resp = self
                .http
                .get(join(endpoint, "card"))
                .timeout(deadline)
                .send()
                .await
                .map_err(classify)?;
            if !resp.status().is_success() {
                return Err(TransportError::ProtocolFault(format!("HTTP {}", resp.status())));
            }
            let body = resp.bytes().await.map_err(classify)?;
            let card: AgentCard = serde_json::from_slice(&body)
                .map_err(|e| TransportError::ProtocolFault(format!("malformed card: {e}")))?;
            if card.capabilities.is_empty() {
                return Err(TransportError::ProtocolFault("card lists no capabilities".into()));
            }
            Ok(card)
        };
        tokio::time::timeout(deadline, exchange)
            .await
            .unwrap_or(Err(TransportError::DeadlineExceeded))
    }
}

/// One-off exchange with a fresh client.
pub async fn send_task(endpoint: &str, msg: &TaskMessage, deadline: Duration) -> Result<TaskResponse, TransportError> {
    Client::new().send_task(endpoint, msg, deadline).await
}
