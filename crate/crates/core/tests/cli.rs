//! The command-line front end, driven in process.

use std::path::Path;

use entailbench::assessor::EvalArtifact;
use entailbench::transport::{agents, serve_agent};

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn cli(args: &[&str], stdin: &str) -> Run {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("entailbench").chain(args.iter().copied());
    let code = entailbench::cli::run(argv, &mut stdin.as_bytes(), &mut out, &mut err);
    Run {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn entail_prints_only_the_label_on_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let premises = dir.path().join("premises.txt");
    std::fs::write(&premises, "# syllogism\nforall x (Man(x) -> Mortal(x))\nMan(socrates)\n").unwrap();
    let r = cli(&["entail", "--premises", path(&premises), "--conclusion", "Mortal(socrates)"], "");
    assert_eq!((r.code, r.out.as_str()), (0, "True\n"), "{}", r.err);
    let diag: serde_json::Value = serde_json::from_str(r.err.trim()).unwrap();
    assert_eq!(diag["label"], "True");
    assert_eq!(diag["conclusive"], true);

    let r = cli(&["entail", "--premises", path(&premises), "--conclusion", "~Mortal(socrates)"], "");
    assert_eq!(r.out.lines().last(), Some("False"));
}

#[test]
fn usage_errors_exit_with_two() {
    let r = cli(&["frobnicate"], "");
    assert_eq!(r.code, 2);
    assert!(r.out.is_empty());
    assert!(!r.err.is_empty());
    assert_eq!(cli(&["entail", "--conclusion", "P"], "").code, 2);
    assert_eq!(cli(&["synth", "--count", "0"], "").code, 2);
    let help = cli(&["--help"], "");
    assert_eq!(help.code, 0);
    assert!(help.out.contains("entail"));
}

#[test]
fn runtime_errors_exit_with_one() {
    let r = cli(&["report", "--artifact", "/nonexistent/artifact.json"], "");
    assert_eq!(r.code, 1);
    assert!(r.err.starts_with("error:"), "{}", r.err);
}

#[test]
fn parse_reports_canonical_forms_and_offsets() {
    let r = cli(&["parse"], "forall x (P(x) -> Q(x))\n\nP(a) & (Q(a)\nP(a) | | Q(a)\n");
    assert_eq!(r.code, 1);
    let lines: Vec<&str> = r.out.lines().collect();
    assert_eq!(lines.len(), 3, "{}", r.out);
    assert_eq!(lines[0], "∀x (P(x) → Q(x))");
    assert_eq!(lines[1], "syntax error at byte 12: 1 unclosed `(` (opened at byte 7)");
    assert!(lines[2].starts_with("syntax error at byte 7: expected"), "{}", lines[2]);
    assert_eq!(cli(&["parse"], "P(a) xor Q(b)\n").out, "P(a) ⊕ Q(b)\n");
}

#[test]
fn synth_then_clean_repairs_the_corruptions() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.jsonl");
    let log = dir.path().join("corruptions.jsonl");
    let r = cli(
        &["synth", "--count", "30", "--seed", "2", "--corrupt-seed", "3", "--corruptions", path(&log), "--out", path(&data)],
        "",
    );
    assert_eq!(r.code, 0, "{}", r.err);
    assert_eq!(std::fs::read_to_string(&log).unwrap().lines().count(), 30);

    let cleaned = dir.path().join("clean.jsonl");
    let report = dir.path().join("report.json");
    let r = cli(
        &["clean", "--in", path(&data), "--out", path(&cleaned), "--report", path(&report), "--workers", "2"],
        "",
    );
    assert_eq!(r.code, 0, "{}", r.err);
    let rep: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(rep["total"], 30);
    assert_eq!(rep["verified_after_repair"]["count"], 30, "{rep}");
    let lines: Vec<serde_json::Value> = std::fs::read_to_string(&cleaned)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 30);
    assert!(lines.iter().all(|l| l["cleaning"]["category"] == "verified_after_repair"));
}

#[test]
fn assess_and_report_against_a_live_agent() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.jsonl");
    assert_eq!(cli(&["synth", "--count", "12", "--seed", "4", "--out", path(&data)], "").code, 0);
    let instances = entailbench::datapipe::load_dataset(&data, &Default::default()).unwrap().instances;

    let rt = tokio::runtime::Runtime::new().unwrap();
    let server = rt
        .block_on(serve_agent(
            agents::gold_fol(&instances, Default::default()),
            "127.0.0.1:0".parse().unwrap(),
        ))
        .unwrap();
    let artifact = dir.path().join("run.json");
    let r = cli(
        &["assess", "--dataset", path(&data), "--agent-url", &server.url(), "--out", path(&artifact), "--concurrency", "3"],
        "",
    );
    rt.block_on(server.shutdown()).unwrap();
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(r.out.contains("Overall"), "{}", r.out);

    let a = EvalArtifact::load(&artifact).unwrap();
    assert_eq!((a.metrics.total, a.metrics.correct), (12, 12));
    assert_eq!(a.agent.card.as_ref().map(|c| c.name.as_str()), Some("gold-fol"));
    assert_eq!(a.config["assess.concurrency"], "3");

    let report = cli(&["report", "--artifact", path(&artifact)], "");
    assert_eq!((report.code, report.out.as_str()), (0, r.out.as_str()));

    let mut tampered: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&artifact).unwrap()).unwrap();
    tampered["metrics"]["correct"] = 11.into();
    std::fs::write(&artifact, tampered.to_string()).unwrap();
    assert_eq!(cli(&["report", "--artifact", path(&artifact)], "").code, 1);
}
