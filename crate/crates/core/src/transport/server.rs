use std::future::Future;
use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::State;
use axum::http::StatusCode;
use axum::routing::{get, post};
use axum::{Json, Router};
use tokio::sync::{oneshot, Mutex};
use tokio::task::JoinHandle;

use super::{AgentCard, TaskMessage, TaskResponse, PROTOCOL};

/// Task text in, answer text or error message out. A panic counts as an
/// error carrying the panic message.
pub type Handler = Arc<dyn Fn(&TaskMessage) -> Result<String, String> + Send + Sync>;

#[derive(Clone)]
pub struct Agent {
    pub card: AgentCard,
    pub handler: Handler,
    /// Serialize handler calls instead of running them concurrently.
    pub single_flight: bool,
}

impl Agent {
    pub fn new(card: AgentCard, handler: impl Fn(&TaskMessage) -> Result<String, String> + Send + Sync + 'static) -> Self {
        Agent {
            card,
            handler: Arc::new(handler),
            single_flight: false,
        }
    }

    pub fn single_flight(mut self) -> Self {
        self.single_flight = true;
        self
    }
}

impl std::fmt::Debug for Agent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Agent")
            .field("card", &self.card)
            .field("single_flight", &self.single_flight)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, thiserror::Error)]
#[error("cannot bind {addr}: {source}")]
pub struct BindError {
    pub addr: SocketAddr,
    #[source]
    pub source: std::io::Error,
}

struct AppState {
    agent: Agent,
    gate: Mutex<()>,
}

fn panic_text(payload: Box<dyn std::any::Any + Send>) -> String {
    if let Some(s) = payload.downcast_ref::<&str>() {
        (*s).to_string()
    } else if let Some(s) = payload.downcast_ref::<String>() {
        s.clone()
    } else {
        "handler panicked".into()
    }
}

async fn handle_task(State(state): State<Arc<AppState>>, body: Bytes) -> (StatusCode, Json<TaskResponse>) {
    let msg: TaskMessage = match serde_json::from_slice(&body) {
        Ok(m) => m,
        Err(e) => {
            return (
                StatusCode::BAD_REQUEST,
                Json(TaskResponse::failed("", format!("malformed task: {e}"))),
            )
        }
    };
    if msg.protocol != PROTOCOL {
        let err = format!("unsupported protocol {:?}, expected {PROTOCOL:?}", msg.protocol);
        return (StatusCode::OK, Json(TaskResponse::failed(msg.task_id, err)));
    }
    let _guard = match state.agent.single_flight {
        true => Some(state.gate.lock().await),
        false => None,
    };
    let handler = state.agent.handler.clone();
    let task = msg.clone();
    let outcome = tokio::task::spawn_blocking(move || handler(&task)).await;
    let resp = match outcome {
        Ok(Ok(content)) => TaskResponse::completed(msg.task_id, content),
        Ok(Err(error)) => TaskResponse::failed(msg.task_id, error),
        Err(e) if e.is_panic() => TaskResponse::failed(msg.task_id, panic_text(e.into_panic())),
        Err(e) => TaskResponse::failed(msg.task_id, e.to_string()),
    };
    (StatusCode::OK, Json(resp))
}

async fn handle_card(State(state): State<Arc<AppState>>) -> Json<AgentCard> {
    Json(state.agent.card.clone())
}

/// A running agent server. Dropping the handle without calling
/// [`ServerHandle::shutdown`] leaves the server running until the runtime
/// stops.
#[derive(Debug)]
pub struct ServerHandle {
    addr: SocketAddr,
    stop: Option<oneshot::Sender<()>>,
    task: JoinHandle<std::io::Result<()>>,
}

impl ServerHandle {
    pub fn local_addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn url(&self) -> String {
        format!("http://{}", self.addr)
    }

    /// Stops accepting connections and waits for in-flight tasks to be
    /// answered.
    pub async fn shutdown(mut self) -> std::io::Result<()> {
        if let Some(stop) = self.stop.take() {
            let _ = stop.send(());
        }
        self.task.await.unwrap_or_else(|e| Err(std::io::Error::other(e)))
    }

    /// Serves until `signal` resolves, then shuts down.
    pub async fn run_until(self, signal: impl Future<Output = ()>) -> std::io::Result<()> {
        signal.await;
        self.shutdown().await
    }
}

/// Binds `addr` (port 0 picks a free port) and serves `POST /task` and
/// `GET /card` on the current tokio runtime.
pub async fn serve_agent(agent: Agent, addr: SocketAddr) -> Result<ServerHandle, BindError> {
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .map_err(|source| BindError { addr, source })?;
    let local = listener.local_addr().map_err(|source| BindError { addr, source })?;
    let state = Arc::new(AppState {
        agent,
        gate: Mutex::new(()),
    });
    let app = Router::new()
        .route("/task", post(handle_task))
        .route("/card", get(handle_card))
        .with_state(state);
    let (stop, stopped) = oneshot::channel::<()>();
    let task = tokio::spawn(async move {
        axum::serve(listener, app)
            .with_graceful_shutdown(async {
                let _ = stopped.await;
            })
            .await
    });
    Ok(ServerHandle {
        addr: local,
        stop: Some(stop),
        task,
    })
}
