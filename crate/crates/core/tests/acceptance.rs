//! Acceptance criteria, one line of output each. The lines go straight to
//! the process's stdout, so they show up even when test output is captured.

mod common;

use std::collections::BTreeMap;
use std::io::Write;
use std::time::{Duration, Instant};

use entailbench::assessor::{
    aggregate, run_benchmark, AssessBudget, FailureType, HttpAgent, InstanceRecord, RunContext, TaskSpec,
};
use entailbench::datapipe::corrupt::corrupt_dataset;
use entailbench::datapipe::synth::synthetic_dataset;
use entailbench::datapipe::{clean_dataset, Category, CleaningReport, RuleRepairer, Verifier};
use entailbench::fol::Label;
use entailbench::oracle::{entailment_universe, oracle_classify, random_instance, GenConfig};
use entailbench::prover::{classify_entailment, Budget, ExternalProver};
use entailbench::stats::format_percent;
use entailbench::transport::{agents, serve_agent, Agent};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::HAND_SUITE;

type Outcome = Result<String, String>;

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let cfg = GenConfig::default();
    let budget = Budget::default();
    let start = Instant::now();
    let (mut conclusive, mut agree) = (0, 0);
    let mut disagreements = Vec::new();
    for i in 0..500 {
        let inst = random_instance(&mut rng, &cfg);
        let r = classify_entailment(&inst.premises, &inst.conclusion, &budget).map_err(|e| e.to_string())?;
        if !r.conclusive {
            continue;
        }
        conclusive += 1;
        let u = entailment_universe(&inst.premises, &inst.conclusion).map_err(|e| e.to_string())?;
        let o = oracle_classify(&inst.premises, &inst.conclusion, &u).map_err(|e| e.to_string())?;
        if o == r.label {
            agree += 1;
        } else {
            disagreements.push(i);
        }
    }
    let elapsed = start.elapsed();
    check(
        agree == conclusive && conclusive * 100 >= 500 * 99 && elapsed < Duration::from_secs(120),
        format!(
            "{agree}/{conclusive} conclusive results agree, {conclusive}/500 conclusive, {:.1} s, disagreements {disagreements:?}",
            elapsed.as_secs_f64()
        ),
    )
}

fn hand_suite() -> Outcome {
    let mut wrong = Vec::new();
    let mut oracle_checked = 0;
    for case in HAND_SUITE {
        let (premises, conclusion) = case.parsed();
        if !case.uses_functions {
            let u = entailment_universe(&premises, &conclusion).map_err(|e| e.to_string())?;
            let o = oracle_classify(&premises, &conclusion, &u).map_err(|e| e.to_string())?;
            if o != case.label {
                return Err(format!("oracle says {o} for {:?}, suite says {}", case.name, case.label));
            }
            oracle_checked += 1;
        }
        let r = classify_entailment(&premises, &conclusion, &Budget::default()).map_err(|e| e.to_string())?;
        if r.label != case.label || !r.conclusive {
            wrong.push(format!("{}: {}", case.name, r.label));
        }
    }
    let per_label: Vec<usize> = Label::ALL
        .iter()
        .map(|l| HAND_SUITE.iter().filter(|c| c.label == *l).count())
        .collect();
    check(
        wrong.is_empty() && per_label == [10, 10, 10],
        format!(
            "{}/30 correct ({oracle_checked} oracle-labelled), per label {per_label:?}, wrong {wrong:?}",
            30 - wrong.len()
        ),
    )
}

fn records_with(slices: [(Label, usize, usize); 3]) -> Vec<InstanceRecord> {
    let mut out = Vec::new();
    for (label, correct, total) in slices {
        let wrong = Label::ALL.into_iter().find(|l| *l != label).unwrap();
        for i in 0..total {
            let predicted = if i < correct { label } else { wrong };
            out.push(InstanceRecord {
                instance_id: format!("{label}-{i:03}"),
                gold: label,
                predicted: Some(predicted),
                correct: predicted == label,
                failure: None,
                detail: None,
                latency_ms: 0,
                attempts: 1,
                raw_response_digest: None,
            });
        }
    }
    out
}

fn table_arithmetic() -> Outcome {
    let runs = [
        (
            [(Label::True, 65, 73), (Label::False, 27, 61), (Label::Uncertain, 58, 69)],
            ["89.04%", "44.26%", "84.06%"],
            "73.89%",
        ),
        (
            [(Label::True, 66, 73), (Label::False, 47, 61), (Label::Uncertain, 63, 69)],
            ["90.41%", "77.05%", "91.30%"],
            "86.70%",
        ),
    ];
    let mut got = Vec::new();
    let mut ok = true;
    for (slices, per_label, overall) in runs {
        let m = aggregate(&records_with(slices));
        let printed: Vec<String> = m.per_label.iter().map(|l| format_percent(l.accuracy, 2)).collect();
        let total = format_percent(m.accuracy, 2);
        ok &= printed == per_label && total == overall && m.total == 203;
        got.push(format!("{}/{} {total} {printed:?}", m.correct, m.total));
    }
    check(ok, got.join("; "))
}

fn report_arithmetic() -> Outcome {
    let a = CleaningReport::from_counts(674, 23, 304, Vec::new());
    let b = CleaningReport::from_counts(154, 10, 39, Vec::new());
    let show = |r: &CleaningReport| {
        [&r.verified_direct, &r.verified_after_repair, &r.problematic]
            .map(|c| format_percent(c.percent, 1))
            .join("/")
    };
    let (sa, sb) = (show(&a), show(&b));
    check(
        sa == "67.3%/2.3%/30.4%" && sb == "75.9%/4.9%/19.2%",
        format!("674/23/304 -> {sa}, 154/10/39 -> {sb}"),
    )
}

fn three_tasks() -> Vec<TaskSpec> {
    (0..3)
        .map(|i| TaskSpec {
            instance_id: format!("t{i}"),
            premises_nl: vec![format!("Premise number {i}.")],
            conclusion_nl: "A conclusion.".into(),
            gold_label: Label::ALL[i],
        })
        .collect()
}

async fn serve(agent: Agent) -> entailbench::transport::ServerHandle {
    serve_agent(agent, "127.0.0.1:0".parse().unwrap()).await.unwrap()
}

async fn failure_taxonomy() -> Outcome {
    let timeout_ms = 400;
    let budget = AssessBudget::new(timeout_ms, 0).unwrap();
    let cases = [
        (agents::delay(Duration::from_millis(timeout_ms + 500), "True".into()), FailureType::Timeout),
        (agents::crash(), FailureType::RuntimeError),
        (agents::garbage(), FailureType::ParseError),
    ];
    let mut lines = Vec::new();
    let mut ok = true;
    for (agent, expected) in cases {
        let name = agent.card.name.clone();
        let server = serve(agent).await;
        let start = Instant::now();
        let art = run_benchmark(&three_tasks(), &HttpAgent::new(server.url()), &budget, 1, &RunContext::default())
            .await
            .map_err(|e| e.to_string())?;
        let wall = start.elapsed();
        let all = art.records.iter().all(|r| r.failure == Some(expected) && r.predicted.is_none());
        let slowest = art.records.iter().map(|r| r.latency_ms).max().unwrap_or(0);
        let within = expected != FailureType::Timeout
            || (slowest <= timeout_ms + 1000 && wall <= Duration::from_millis(3 * (timeout_ms + 1000)));
        ok &= all && within && art.records.len() == 3;
        lines.push(format!("{name} -> {expected} x{} (slowest {slowest} ms)", art.records.len()));
        server.shutdown().await.map_err(|e| e.to_string())?;
    }
    check(ok, lines.join(", "))
}

fn seeded_corruption_repair() -> Outcome {
    let clean = synthetic_dataset(50, 7);
    let verifier = Verifier::default();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let (broken, log) = corrupt_dataset(&clean, &verifier, &mut rng);
    let mut per_class: BTreeMap<String, usize> = BTreeMap::new();
    for c in &log {
        *per_class.entry(format!("{:?}", c.class)).or_default() += 1;
    }
    let repairer = RuleRepairer::from_instances(&broken);
    let (outcomes, report) = clean_dataset(&broken, &repairer, 3, &verifier, 4);
    let one_iter = outcomes
        .iter()
        .filter(|o| matches!(o.category, Category::VerifiedAfterRepair { iterations: 1, .. }))
        .count();
    let mut reverify_failures = 0;
    for (o, inst) in outcomes.iter().zip(&broken) {
        assert_eq!(o.id, inst.id);
        if !matches!(o.category, Category::Problematic { .. }) {
            let fixed = o.apply_to(inst);
            if !verifier.verify(&fixed).is_ok_and(|r| r.matches_expected) {
                reverify_failures += 1;
            }
        }
    }
    check(
        log.len() == 50 && one_iter * 100 >= 95 * 50 && reverify_failures == 0,
        format!(
            "{one_iter}/50 repaired in one iteration, {} problematic {:?}, {reverify_failures} fail re-verification, defects {per_class:?}",
            report.problematic.count, report.problematic_ids
        ),
    )
}

async fn gold_round_trip() -> Outcome {
    let ds = synthetic_dataset(50, 7);
    let server = serve(agents::gold_fol(&ds, Budget::default())).await;
    let tasks: Vec<TaskSpec> = ds.iter().map(TaskSpec::from_instance).collect();
    let art = run_benchmark(&tasks, &HttpAgent::new(server.url()), &AssessBudget::default(), 4, &RunContext::default())
        .await
        .map_err(|e| e.to_string())?;
    server.shutdown().await.map_err(|e| e.to_string())?;
    let f = &art.metrics.failures;
    let failures = f.timeout + f.runtime_error + f.parse_error;
    check(
        art.metrics.accuracy == 100.0 && failures == 0 && art.records.len() == 50,
        format!(
            "{}/{} correct ({}), {failures} failures",
            art.metrics.correct,
            art.metrics.total,
            format_percent(art.metrics.accuracy, 2)
        ),
    )
}

async fn artifact_integrity() -> Outcome {
    let tasks: Vec<TaskSpec> = (0..12)
        .map(|i| TaskSpec {
            instance_id: format!("q{i:02}"),
            premises_nl: vec![format!("Premise {i}.")],
            conclusion_nl: "Conclusion.".into(),
            gold_label: Label::ALL[i % 3],
        })
        .collect();
    let answers: BTreeMap<String, String> = tasks
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let a = match i % 4 {
                0 => "Reasoning...\nTrue".to_string(),
                1 => "**False**".to_string(),
                2 => "uncertain".to_string(),
                _ => "no idea".to_string(),
            };
            (t.instance_id.clone(), a)
        })
        .collect();
    let server = serve(agents::scripted(answers)).await;
    let dir = std::env::temp_dir().join(format!("entailbench-accept-{}", uuid::Uuid::new_v4()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let mut runs = Vec::new();
    for (n, concurrency) in [(1, 1), (2, 8)] {
        let ctx = RunContext {
            output: Some(dir.join(format!("run{n}.json"))),
            ..RunContext::default()
        };
        run_benchmark(&tasks, &HttpAgent::new(server.url()), &AssessBudget::default(), concurrency, &ctx)
            .await
            .map_err(|e| e.to_string())?;
        let loaded = entailbench::assessor::EvalArtifact::load(ctx.output.as_ref().unwrap()).map_err(|e| e.to_string())?;
        runs.push(loaded);
    }
    server.shutdown().await.map_err(|e| e.to_string())?;
    let _ = std::fs::remove_dir_all(&dir);
    let consistent = runs.iter().all(|a| a.metrics_consistent());
    let identical = runs[0].normalized() == runs[1].normalized();
    check(
        consistent && identical && runs[0].run_id != runs[1].run_id,
        format!(
            "metrics recompute exactly: {consistent}, runs identical modulo run id/timestamps/latency: {identical}, accuracy {}",
            format_percent(runs[0].metrics.accuracy, 2)
        ),
    )
}

/// `None` when no external prover is configured.
fn tptp_bridge() -> Option<Outcome> {
    let prover = ExternalProver::from_env()?;
    let mut wrong = Vec::new();
    for case in HAND_SUITE {
        let (premises, conclusion) = case.parsed();
        let internal = classify_entailment(&premises, &conclusion, &Budget::default()).map(|r| r.label);
        match (prover.classify(&premises, &conclusion, Duration::from_secs(30)), internal) {
            (Ok(a), Ok(b)) if a == b => {}
            (ext, int) => wrong.push(format!("{}: external {ext:?}, internal {int:?}", case.name)),
        }
    }
    Some(check(
        wrong.is_empty(),
        format!("{}/30 agree with {}, {wrong:?}", 30 - wrong.len(), prover.path.display()),
    ))
}

#[test]
fn acceptance_criteria() {
    let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build().unwrap();
    let results: Vec<(&str, Option<Outcome>)> = vec![
        ("oracle equivalence", Some(oracle_equivalence())),
        ("hand suite", Some(hand_suite())),
        ("accuracy table arithmetic", Some(table_arithmetic())),
        ("cleaning report arithmetic", Some(report_arithmetic())),
        ("failure taxonomy", Some(rt.block_on(failure_taxonomy()))),
        ("seeded corruption repair", Some(seeded_corruption_repair())),
        ("gold-FOL round trip", Some(rt.block_on(gold_round_trip()))),
        ("artifact integrity", Some(rt.block_on(artifact_integrity()))),
        ("TPTP bridge", tptp_bridge()),
    ];
    let mut failed = Vec::new();
    let mut out = std::io::stdout().lock();
    for (i, (name, outcome)) in results.iter().enumerate() {
        let n = i + 1;
        let line = match outcome {
            Some(Ok(detail)) => format!("criterion {n} PASS {name}: {detail}"),
            Some(Err(detail)) => {
                failed.push(n);
                format!("criterion {n} FAIL {name}: {detail}")
            }
            None => format!("criterion {n} SKIP {name}: set ENTAILBENCH_TPTP_PROVER to run"),
        };
        writeln!(out, "{line}").unwrap();
    }
    out.flush().unwrap();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
