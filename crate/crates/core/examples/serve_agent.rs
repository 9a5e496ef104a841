//! Run a reference agent on a local port and send it one task.

use std::time::Duration;

use entailbench::datapipe::synth::synthetic_dataset;
use entailbench::prover::Budget;
use entailbench::transport::{agents, serve_agent, Client, TaskMessage};

#[tokio::main]
async fn main() {
    let data = synthetic_dataset(3, 9);
    let server = serve_agent(agents::gold_fol(&data, Budget::default()), "127.0.0.1:0".parse().unwrap())
        .await
        .expect("bind");
    println!("agent at {}", server.url());

    let client = Client::new();
    let card = client.fetch_card(&server.url(), Duration::from_secs(2)).await.unwrap();
    println!("card: {card:?}");

    let inst = &data[0];
    let msg = TaskMessage::new(format!("{}:1", inst.id), inst.premises_nl.clone(), inst.conclusion_nl.clone());
    println!("request:  {}", serde_json::to_string(&msg).unwrap());
    let resp = client.send_task(&server.url(), &msg, Duration::from_secs(10)).await.unwrap();
    println!("response: {}", serde_json::to_string(&resp).unwrap());
    println!("expected: {}", inst.expected_label);

    server.shutdown().await.unwrap();
}
