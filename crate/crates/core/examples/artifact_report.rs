//! Write an evaluation artifact, load it back, check its metrics and
//! render the report.

use std::collections::BTreeMap;

use entailbench::assessor::{render_table, run_benchmark, AssessBudget, DatasetIdentity, EvalArtifact, HttpAgent, RunContext, TaskSpec};
use entailbench::datapipe::synth::synthetic_dataset;
use entailbench::transport::{agents, serve_agent};

#[tokio::main]
async fn main() {
    let tasks: Vec<TaskSpec> = synthetic_dataset(9, 6).iter().map(TaskSpec::from_instance).collect();
    let answers: BTreeMap<String, String> =
        tasks.iter().map(|t| (t.instance_id.clone(), "Uncertain".to_string())).collect();
    let server = serve_agent(agents::scripted(answers), "127.0.0.1:0".parse().unwrap()).await.unwrap();

    let path = std::env::temp_dir().join(format!("entailbench-example-{}.json", std::process::id()));
    let ctx = RunContext {
        dataset: DatasetIdentity::of_tasks("synthetic-9", &tasks),
        output: Some(path.clone()),
        ..RunContext::default()
    };
    run_benchmark(&tasks, &HttpAgent::new(server.url()), &AssessBudget::default(), 2, &ctx).await.unwrap();
    server.shutdown().await.unwrap();

    let loaded = EvalArtifact::load(&path).unwrap();
    println!("{} (schema {}, run {})", path.display(), loaded.schema_version, loaded.run_id);
    println!("metrics consistent: {}", loaded.metrics_consistent());
    print!("{}", render_table(&loaded));
    std::fs::remove_file(&path).ok();
}
