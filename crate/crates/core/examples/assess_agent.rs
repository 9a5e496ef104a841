//! Assess an agent over a dataset and print the accuracy table.

use std::collections::BTreeMap;
use std::time::Duration;

use entailbench::assessor::{
    render_table, run_benchmark, AgentIdentity, AssessBudget, DatasetIdentity, HttpAgent, RunContext, TaskSpec,
};
use entailbench::datapipe::synth::synthetic_dataset;
use entailbench::transport::{agents, serve_agent, Agent, AgentCard, TaskMessage};

#[tokio::main]
async fn main() {
    let tasks: Vec<TaskSpec> = synthetic_dataset(30, 2).iter().map(TaskSpec::from_instance).collect();

    // Always says True, stalls on every fifth task and rambles on every seventh.
    let optimist = Agent::new(AgentCard::new("optimist"), |task: &TaskMessage| {
        let n: usize = agents::instance_of(&task.task_id)[1..].parse().unwrap_or(0);
        if n % 5 == 4 {
            std::thread::sleep(Duration::from_millis(800));
        }
        Ok(if n % 7 == 6 { "Hard to say.".into() } else { "Let me see...\n**True**".into() })
    });
    let server = serve_agent(optimist, "127.0.0.1:0".parse().unwrap()).await.unwrap();

    let ctx = RunContext {
        agent: AgentIdentity {
            endpoint: server.url(),
            card: None,
        },
        dataset: DatasetIdentity::of_tasks("synthetic-30", &tasks),
        config: BTreeMap::new(),
        output: None,
    };
    let budget = AssessBudget::new(500, 0).unwrap();
    let artifact = run_benchmark(&tasks, &HttpAgent::new(server.url()), &budget, 8, &ctx).await.unwrap();
    server.shutdown().await.unwrap();

    print!("{}", render_table(&artifact));
    for r in artifact.records.iter().filter(|r| r.failure.is_some()).take(3) {
        println!("{}: {:?} {}", r.instance_id, r.failure.unwrap(), r.detail.as_deref().unwrap_or(""));
    }
}
