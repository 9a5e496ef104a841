//! Client and server over real sockets, including endpoints that
//! misbehave at the HTTP level.

use std::net::SocketAddr;
use std::time::{Duration, Instant};

use entailbench::transport::{
    agents, serve_agent, Client, TaskMessage, TaskResponse, TaskStatus, TransportError,
};
use tokio::io::{AsyncReadExt, AsyncWriteExt};
use tokio::net::{TcpListener, TcpStream};

fn local() -> SocketAddr {
    "127.0.0.1:0".parse().unwrap()
}

fn task(id: &str) -> TaskMessage {
    TaskMessage::new(id, vec!["P(a)".into(), "∀x (P(x) → Q(x))".into()], "Q(a)")
}

/// Reads one HTTP request: headers, then `content-length` bytes of body.
async fn read_request(sock: &mut TcpStream) {
    let mut buf = Vec::new();
    let mut chunk = [0u8; 4096];
    loop {
        let n = sock.read(&mut chunk).await.unwrap();
        if n == 0 {
            return;
        }
        buf.extend_from_slice(&chunk[..n]);
        let text = String::from_utf8_lossy(&buf);
        if let Some(end) = text.find("\r\n\r\n") {
            let length = text[..end]
                .lines()
                .find_map(|l| l.to_ascii_lowercase().strip_prefix("content-length:").map(|v| v.trim().parse::<usize>().unwrap()))
                .unwrap_or(0);
            if buf.len() >= end + 4 + length {
                return;
            }
        }
    }
}

/// An endpoint that answers every request with a fixed status and body.
async fn canned(status: &'static str, body: String) -> String {
    let listener = TcpListener::bind(local()).await.unwrap();
    let url = format!("http://{}", listener.local_addr().unwrap());
    tokio::spawn(async move {
        while let Ok((mut sock, _)) = listener.accept().await {
            read_request(&mut sock).await;
            let reply = format!(
                "HTTP/1.1 {status}\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{body}",
                body.len()
            );
            let _ = sock.write_all(reply.as_bytes()).await;
            let _ = sock.shutdown().await;
        }
    });
    url
}

#[tokio::test(flavor = "multi_thread")]
async fn echo_round_trip() {
    let server = serve_agent(agents::echo(), local()).await.unwrap();
    let client = Client::new();
    let resp = client.send_task(&server.url(), &task("e1:1"), Duration::from_secs(5)).await.unwrap();
    assert_eq!((resp.task_id.as_str(), resp.status), ("e1:1", TaskStatus::Completed));
    assert_eq!(resp.content, "P(a)\n∀x (P(x) → Q(x))\n--\nQ(a)");
    let card = client.fetch_card(&server.url(), Duration::from_secs(5)).await.unwrap();
    assert_eq!(card.name, "echo");
    server.shutdown().await.unwrap();
}

#[tokio::test(flavor = "multi_thread")]
async fn silent_endpoint_hits_the_deadline() {
    let listener = TcpListener::bind(local()).await.unwrap();
    let url = format!("http://{}", listener.local_addr().unwrap());
    let hold = tokio::spawn(async move {
        let mut open = Vec::new();
        while let Ok((sock, _)) = listener.accept().await {
            open.push(sock);
        }
    });
    let start = Instant::now();
    let r = Client::new().send_task(&url, &task("s:1"), Duration::from_millis(100)).await;
    assert_eq!(r, Err(TransportError::DeadlineExceeded));
    assert!(start.elapsed() < Duration::from_secs(1), "{:?}", start.elapsed());
    hold.abort();
}

#[tokio::test(flavor = "multi_thread")]
async fn malformed_exchanges_are_protocol_faults() {
    let wrong_id = serde_json::to_string(&TaskResponse::completed("other:1", "True")).unwrap();
    let mut no_error = serde_json::to_value(TaskResponse::failed("m:1", "x")).unwrap();
    no_error.as_object_mut().unwrap().remove("error");
    let cases = [
        ("200 OK", wrong_id),
        ("200 OK", "this is not json".to_string()),
        ("200 OK", r#"{"protocol":"ab-mini/1"}"#.to_string()),
        ("200 OK", no_error.to_string()),
        ("500 Internal Server Error", "{}".to_string()),
    ];
    let client = Client::new();
    for (status, body) in cases {
        let url = canned(status, body.clone()).await;
        match client.send_task(&url, &task("m:1"), Duration::from_secs(5)).await {
            Err(TransportError::ProtocolFault(_)) => {}
            other => panic!("{status} {body}: {other:?}"),
        }
    }
}

#[tokio::test(flavor = "multi_thread")]
async fn closed_port_is_a_connection_fault() {
    let addr = TcpListener::bind(local()).await.unwrap().local_addr().unwrap();
    let r = Client::new().send_task(&format!("http://{addr}"), &task("c:1"), Duration::from_secs(5)).await;
    assert!(matches!(r, Err(TransportError::ConnectionFault(_))), "{r:?}");
}

#[tokio::test(flavor = "multi_thread")]
async fn server_stays_up_and_drains_on_shutdown() {
    let echo = serve_agent(agents::echo(), local()).await.unwrap();
    let client = Client::new();
    for i in 0..50 {
        let id = format!("n{i}:1");
        let resp = client.send_task(&echo.url(), &task(&id), Duration::from_secs(5)).await.unwrap();
        assert_eq!(resp.task_id, id);
    }
    echo.shutdown().await.unwrap();

    let slow = serve_agent(agents::delay(Duration::from_millis(300), "True".into()), local()).await.unwrap();
    let url = slow.url();
    let in_flight: Vec<_> = (0..6)
        .map(|i| {
            let (client, url) = (client.clone(), url.clone());
            tokio::spawn(async move { client.send_task(&url, &task(&format!("d{i}:1")), Duration::from_secs(5)).await })
        })
        .collect();
    tokio::time::sleep(Duration::from_millis(100)).await;
    slow.shutdown().await.unwrap();
    for h in in_flight {
        let resp = h.await.unwrap().unwrap();
        assert_eq!(resp.content, "True");
    }
    let after = client.send_task(&url, &task("late:1"), Duration::from_secs(2)).await;
    assert!(matches!(after, Err(TransportError::ConnectionFault(_))), "{after:?}");
}
