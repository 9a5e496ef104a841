//! Assessment runs against live reference agents.

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::time::Duration;

use entailbench::assessor::{
    retry_with_feedback, run_benchmark, AssessBudget, BenchError, DatasetIdentity, EvalArtifact, FailureType,
    HttpAgent, RunContext, Tap, TaskSpec,
};
use entailbench::datapipe::repair_parentheses;
use entailbench::datapipe::synth::synthetic_dataset;
use entailbench::fol::{parse_formula, Label};
use entailbench::prover::Budget;
use entailbench::transport::{agents, serve_agent, Agent, AgentCard, ServerHandle, TaskMessage};

fn local() -> SocketAddr {
    "127.0.0.1:0".parse().unwrap()
}

fn tasks(count: usize, seed: u64) -> Vec<TaskSpec> {
    synthetic_dataset(count, seed).iter().map(TaskSpec::from_instance).collect()
}

fn ctx(server: &ServerHandle, tasks: &[TaskSpec]) -> RunContext {
    RunContext {
        dataset: DatasetIdentity::of_tasks("synthetic", tasks),
        agent: entailbench::assessor::AgentIdentity {
            endpoint: server.url(),
            card: None,
        },
        ..RunContext::default()
    }
}

async fn run(agent: Agent, tasks: &[TaskSpec], budget: AssessBudget, concurrency: usize) -> EvalArtifact {
    let server = serve_agent(agent, local()).await.unwrap();
    let a = run_benchmark(tasks, &HttpAgent::new(server.url()), &budget, concurrency, &ctx(&server, tasks))
        .await
        .unwrap();
    server.shutdown().await.unwrap();
    a
}

#[tokio::test(flavor = "multi_thread")]
async fn gold_agent_scores_perfectly() {
    let data = synthetic_dataset(203, 11);
    let tasks: Vec<TaskSpec> = data.iter().map(TaskSpec::from_instance).collect();
    let a = run(agents::gold_fol(&data, Budget::default()), &tasks, AssessBudget::default(), 8).await;
    assert_eq!((a.metrics.total, a.metrics.correct), (203, 203));
    assert_eq!(a.metrics.accuracy, 100.0);
    assert!(a.metrics_consistent());
}

#[tokio::test(flavor = "multi_thread")]
async fn wire_messages_never_carry_the_gold_label() {
    let data = synthetic_dataset(30, 3);
    let tasks: Vec<TaskSpec> = data.iter().map(TaskSpec::from_instance).collect();
    let server = serve_agent(agents::gold_fol(&data, Budget::default()), local()).await.unwrap();
    let tap = Tap::new(HttpAgent::new(server.url()));
    run_benchmark(&tasks, &tap, &AssessBudget::default(), 4, &ctx(&server, &tasks)).await.unwrap();
    server.shutdown().await.unwrap();

    let sent = tap.sent();
    assert_eq!(sent.len(), tasks.len());
    for wire in &sent {
        let mut msg: serde_json::Value = serde_json::from_str(wire).unwrap();
        let obj = msg.as_object_mut().unwrap();
        let id = obj["task_id"].as_str().unwrap().rsplit_once(':').unwrap().0.to_string();
        // The fixed instructions name every label; everything else must not.
        obj.remove("instructions");
        let rest = msg.to_string().to_lowercase();
        let task = tasks.iter().find(|t| t.instance_id == id).unwrap();
        assert!(!rest.contains(&task.gold_label.as_str().to_lowercase()), "{wire}");
    }
    for t in &tasks {
        for other in Label::ALL {
            let flipped = TaskSpec { gold_label: other, ..t.clone() };
            assert_eq!(flipped.to_message(1), t.to_message(1));
        }
    }
}

#[tokio::test(flavor = "multi_thread")]
async fn every_task_gets_exactly_one_outcome() {
    let agent = Agent::new(AgentCard::new("mixed"), |task: &TaskMessage| {
        let n: usize = task.task_id.trim_start_matches('s').split(':').next().unwrap().parse().unwrap();
        match n % 4 {
            0 => Ok("True".into()),
            1 => Err("refused".into()),
            2 => Ok("no idea".into()),
            _ => {
                std::thread::sleep(Duration::from_millis(600));
                Ok("True".into())
            }
        }
    });
    let tasks = tasks(20, 4);
    let a = run(agent, &tasks, AssessBudget::new(250, 0).unwrap(), 20).await;
    assert_eq!(a.records.len(), 20);
    for r in &a.records {
        assert!(r.is_well_formed(), "{r:?}");
        assert_ne!(r.predicted.is_some(), r.failure.is_some(), "{r:?}");
        let n: usize = r.instance_id[1..].parse().unwrap();
        let expected = [None, Some(FailureType::RuntimeError), Some(FailureType::ParseError), Some(FailureType::Timeout)];
        assert_eq!(r.failure, expected[n % 4], "{r:?}");
    }
    let f = a.metrics.failures;
    assert_eq!((f.runtime_error, f.parse_error, f.timeout), (5, 5, 5));
}

#[tokio::test(flavor = "multi_thread")]
async fn crashing_agent_fails_every_task_after_retries() {
    let tasks = tasks(4, 9);
    let a = run(agents::crash(), &tasks, AssessBudget::new(2_000, 2).unwrap(), 4).await;
    assert!(a.records.iter().all(|r| r.failure == Some(FailureType::RuntimeError) && r.attempts == 3));
    assert_eq!((a.metrics.accuracy, a.metrics.failures.runtime_error), (0.0, 4));
}

#[tokio::test(flavor = "multi_thread")]
async fn timeouts_are_bounded_and_not_retried() {
    let tasks = tasks(3, 9);
    let slow = agents::delay(Duration::from_millis(1_500), "True".into());
    let a = run(slow, &tasks, AssessBudget::new(200, 3).unwrap(), 3).await;
    for r in &a.records {
        assert_eq!((r.failure, r.attempts), (Some(FailureType::Timeout), 1), "{r:?}");
        assert!(r.latency_ms < 700, "{r:?}");
    }
}

#[tokio::test(flavor = "multi_thread")]
async fn concurrency_does_not_change_the_artifact() {
    let tasks = tasks(24, 5);
    let answers: BTreeMap<String, String> = tasks
        .iter()
        .enumerate()
        .map(|(i, t)| (t.instance_id.clone(), Label::ALL[i / 2 % 3].to_string()))
        .collect();
    let server = serve_agent(agents::scripted(answers), local()).await.unwrap();
    let dir = tempfile::tempdir().unwrap();
    let mut normalized = Vec::new();
    for (concurrency, name) in [(1, "serial.json"), (8, "parallel.json")] {
        let path = dir.path().join(name);
        let ctx = RunContext {
            output: Some(path.clone()),
            ..ctx(&server, &tasks)
        };
        run_benchmark(&tasks, &HttpAgent::new(server.url()), &AssessBudget::default(), concurrency, &ctx)
            .await
            .unwrap();
        let loaded = EvalArtifact::load(&path).unwrap();
        assert!(loaded.metrics_consistent());
        assert!(loaded.metrics.correct < tasks.len());
        normalized.push(loaded.normalized());
    }
    server.shutdown().await.unwrap();
    assert_eq!(normalized[0], normalized[1]);
}

#[tokio::test(flavor = "multi_thread")]
async fn bad_runs_are_rejected_up_front() {
    let server = serve_agent(agents::echo(), local()).await.unwrap();
    let agent = HttpAgent::new(server.url());
    let budget = AssessBudget::default();
    let one = tasks(1, 1);
    let c = ctx(&server, &one);
    assert!(matches!(run_benchmark(&[], &agent, &budget, 1, &c).await, Err(BenchError::NoTasks)));
    assert!(matches!(run_benchmark(&one, &agent, &budget, 0, &c).await, Err(BenchError::BadConcurrency)));
    let twice = [one[0].clone(), one[0].clone()];
    assert!(matches!(
        run_benchmark(&twice, &agent, &budget, 1, &c).await,
        Err(BenchError::DuplicateInstance(_))
    ));
    server.shutdown().await.unwrap();
}

#[test]
fn feedback_loop_repairs_a_parenthesis_error() {
    let broken = "∀x (Dog(x) → (Animal(x) ∧ Loyal(x))".to_string();
    let out = retry_with_feedback(
        broken,
        |text| parse_formula(text),
        |text, _| repair_parentheses(text).unwrap().remove(0),
        3,
    )
    .unwrap();
    assert_eq!((out.attempts, out.errors.len()), (2, 1));
    assert_eq!(out.value, parse_formula("∀x (Dog(x) → Animal(x) ∧ Loyal(x))").unwrap());
}
