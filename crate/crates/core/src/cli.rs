//! Command-line front end. Labels, tables and JSON go to `out`; logs,
//! diagnostics and usage errors go to `err`. Exit codes: 0 success, 1
//! structural error, 2 usage error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::{Read, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;

use crate::assessor::{
    render_table, run_benchmark, AgentIdentity, DatasetIdentity, EvalArtifact, HttpAgent, RunContext, TaskSpec,
};
use crate::config::Config;
use crate::datapipe::{self, corrupt, synth, Dataset, RuleRepairer, Verifier};
use crate::fol::{self, parse_formula, render, Formula};
use crate::prover::{classify_entailment, ExternalProver};
use crate::transport::{agents, serve_agent, Agent, Client};

#[derive(Debug, Parser)]
#[command(name = "entailbench", version, about = "First-order entailment, dataset cleaning and agent assessment")]
struct Cli {
    /// Config file (default: $ENTAILBENCH_CONFIG).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AgentKind {
    GoldFol,
    Scripted,
    Delay,
    Crash,
    Garbage,
    Echo,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse one formula per line and print its canonical form.
    Parse {
        /// Input file (default: stdin).
        file: Option<PathBuf>,
    },
    /// Classify a conclusion against premises as True, False or Uncertain.
    Entail {
        /// File with one premise per line.
        #[arg(long)]
        premises: PathBuf,
        /// Conclusion formula, or a file containing it.
        #[arg(long)]
        conclusion: String,
        #[arg(long)]
        budget_ms: Option<u64>,
        /// TPTP prover to use instead of the built-in one.
        #[arg(long)]
        external_prover: Option<PathBuf>,
        /// Universally close free variables first.
        #[arg(long)]
        auto_close: bool,
    },
    /// Verify and repair a JSONL dataset.
    Clean {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        max_iters: Option<usize>,
        #[arg(long)]
        budget_ms: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Run a reference agent until interrupted.
    ServeAgent {
        #[arg(long, value_enum)]
        kind: AgentKind,
        #[arg(long)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Annotated dataset (gold-fol lookups, scripted answers by label).
        #[arg(long)]
        dataset: Option<PathBuf>,
        /// JSON object of instance id to answer text (scripted).
        #[arg(long)]
        script: Option<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        delay_ms: u64,
        /// Answer given by the delay agent.
        #[arg(long, default_value = "Uncertain")]
        answer: String,
    },
    /// Assess an agent over a dataset and write the evaluation artifact.
    Assess {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        agent_url: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        timeout_ms: Option<u64>,
        #[arg(long)]
        retries: Option<u32>,
        #[arg(long)]
        concurrency: Option<usize>,
    },
    /// Print the per-category table of an artifact.
    Report {
        #[arg(long)]
        artifact: PathBuf,
    },
    /// Generate a solver-verified synthetic dataset.
    Synth {
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Inject one observable defect per instance with this seed.
        #[arg(long)]
        corrupt_seed: Option<u64>,
        /// Where to write the corruption log (JSONL).
        #[arg(long)]
        corruptions: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct Usage(String);

/// Parses `args` (program name first) and runs the subcommand.
pub fn run<I, T>(args: I, input: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    2
                }
            };
        }
    };
    match dispatch(cli, input, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            if e.downcast_ref::<Usage>().is_some() {
                2
            } else {
                1
            }
        }
    }
}

fn dispatch(cli: Cli, input: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> anyhow::Result<i32> {
    let mut cfg = Config::resolve(cli.config.as_deref()).map_err(|e| Usage(e.to_string()))?;
    match cli.command {
        Command::Parse { file } => parse_cmd(file.as_deref(), input, out),
        Command::Entail {
            premises,
            conclusion,
            budget_ms,
            external_prover,
            auto_close,
        } => {
            if let Some(ms) = budget_ms {
                cfg.budget = cfg.budget.with_timeout_ms(ms).map_err(|e| Usage(e.to_string()))?;
            }
            let prover = external_prover.or(cfg.external_prover.clone());
            entail_cmd(&cfg, &premises, &conclusion, prover.as_deref(), auto_close, out, err)
        }
        Command::Clean {
            input: path,
            out: out_path,
            report,
            max_iters,
            budget_ms,
            workers,
        } => {
            if let Some(ms) = budget_ms {
                cfg.budget = cfg.budget.with_timeout_ms(ms).map_err(|e| Usage(e.to_string()))?;
            }
            cfg.max_iters = max_iters.unwrap_or(cfg.max_iters);
            cfg.workers = workers.unwrap_or(cfg.workers).max(1);
            let out_path = out_path.or(cfg.clean_out.clone()).ok_or_else(|| Usage("--out is required".into()))?;
            let report = report.or(cfg.report_out.clone()).ok_or_else(|| Usage("--report is required".into()))?;
            clean_cmd(&cfg, &path, &out_path, &report, err)
        }
        Command::ServeAgent {
            kind,
            port,
            host,
            dataset,
            script,
            delay_ms,
            answer,
        } => {
            let agent = build_agent(&cfg, kind, dataset.as_deref(), script.as_deref(), delay_ms, answer)?;
            let addr: SocketAddr = format!("{host}:{port}")
                .parse()
                .map_err(|_| Usage(format!("invalid address {host}:{port}")))?;
            serve_cmd(agent, addr, err)
        }
        Command::Assess {
            dataset,
            agent_url,
            out: out_path,
            timeout_ms,
            retries,
            concurrency,
        } => {
            if let Some(ms) = timeout_ms {
                if ms == 0 {
                    return Err(Usage("--timeout-ms must be positive".into()).into());
                }
                cfg.assess.timeout_ms = ms;
            }
            cfg.assess.max_retries = retries.unwrap_or(cfg.assess.max_retries);
            cfg.concurrency = concurrency.unwrap_or(cfg.concurrency);
            if cfg.concurrency == 0 {
                return Err(Usage("--concurrency must be at least 1".into()).into());
            }
            let out_path = out_path.or(cfg.artifact_out.clone()).ok_or_else(|| Usage("--out is required".into()))?;
            cfg.artifact_out = Some(out_path);
            assess_cmd(&cfg, &dataset, &agent_url, out, err)
        }
        Command::Report { artifact } => {
            let a = EvalArtifact::load(&artifact).with_context(|| format!("loading {}", artifact.display()))?;
            write!(out, "{}", render_table(&a))?;
            if !a.metrics_consistent() {
                writeln!(err, "warning: stored metrics do not match the records")?;
                return Ok(1);
            }
            Ok(0)
        }
        Command::Synth {
            count,
            seed,
            corrupt_seed,
            corruptions,
            out: out_path,
        } => synth_cmd(&cfg, count, seed, corrupt_seed, corruptions.as_deref(), out_path.as_deref(), out),
    }
}

fn parse_cmd(file: Option<&Path>, input: &mut dyn Read, out: &mut dyn Write) -> anyhow::Result<i32> {
    let text = match file {
        Some(p) => std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
        None => {
            let mut s = String::new();
            input.read_to_string(&mut s)?;
            s
        }
    };
    let mut code = 0;
    for line in text.lines() {
        if line.trim().is_empty() {
            continue;
        }
        match parse_formula(line) {
            Ok(f) => writeln!(out, "{}", render(&f))?,
            Err(e) => {
                writeln!(out, "{e}")?;
                code = 1;
            }
        }
    }
    Ok(code)
}

fn read_formulas(path: &Path) -> anyhow::Result<Vec<Formula>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| parse_formula(l).map_err(|e| anyhow!("{}:{}: {e}", path.display(), i + 1)))
        .collect()
}

fn entail_cmd(
    cfg: &Config,
    premises: &Path,
    conclusion: &str,
    external: Option<&Path>,
    auto_close: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> anyhow::Result<i32> {
    let mut ps = read_formulas(premises)?;
    let text = match Path::new(conclusion).is_file() {
        true => std::fs::read_to_string(conclusion)?.trim().to_string(),
        false => conclusion.to_string(),
    };
    let mut c = parse_formula(&text).map_err(|e| anyhow!("conclusion: {e}"))?;
    if auto_close {
        ps = ps.iter().map(fol::universal_closure).collect();
        c = fol::universal_closure(&c);
    }
    let start = Instant::now();
    let (label, diagnostics) = match external {
        Some(path) => {
            let prover = ExternalProver::new(path);
            let label = prover.classify(&ps, &c, cfg.budget.wall_timeout)?;
            let diag = serde_json::json!({ "engine": "external", "prover": path.display().to_string() });
            (label, diag)
        }
        None => {
            let result = classify_entailment(&ps, &c, &cfg.budget)?;
            let mut diag = serde_json::to_value(&result)?;
            diag["engine"] = "builtin".into();
            (result.label, diag)
        }
    };
    let mut diagnostics = diagnostics;
    diagnostics["elapsed_ms"] = (start.elapsed().as_millis() as u64).into();
    writeln!(err, "{diagnostics}")?;
    writeln!(out, "{label}")?;
    Ok(0)
}

fn load(cfg: &Config, path: &Path, err: &mut dyn Write) -> anyhow::Result<Dataset> {
    let ds = datapipe::load_dataset(path, &cfg.fields).with_context(|| format!("loading {}", path.display()))?;
    for e in &ds.errors {
        writeln!(err, "skipped {}", e)?;
    }
    Ok(ds)
}

fn clean_cmd(cfg: &Config, input: &Path, out_path: &Path, report: &Path, err: &mut dyn Write) -> anyhow::Result<i32> {
    let ds = load(cfg, input, err)?;
    let repairer = RuleRepairer::from_instances(&ds.instances);
    let verifier = Verifier::new(cfg.budget);
    let (outcomes, rep) = datapipe::clean_dataset(&ds.instances, &repairer, cfg.max_iters, &verifier, cfg.workers);
    std::fs::write(out_path, datapipe::mirror_jsonl(&ds, &outcomes, &cfg.fields))
        .with_context(|| format!("writing {}", out_path.display()))?;
    std::fs::write(report, serde_json::to_string_pretty(&rep)? + "\n")
        .with_context(|| format!("writing {}", report.display()))?;
    writeln!(
        err,
        "{} instances: {} verified directly ({}%), {} after repair ({}%), {} problematic ({}%)",
        rep.total,
        rep.verified_direct.count,
        rep.verified_direct.percent,
        rep.verified_after_repair.count,
        rep.verified_after_repair.percent,
        rep.problematic.count,
        rep.problematic.percent
    )?;
    Ok(0)
}

fn build_agent(
    cfg: &Config,
    kind: AgentKind,
    dataset: Option<&Path>,
    script: Option<&Path>,
    delay_ms: u64,
    answer: String,
) -> anyhow::Result<Agent> {
    let instances = match dataset {
        Some(p) => Some(datapipe::load_dataset(p, &cfg.fields)?.instances),
        None => None,
    };
    Ok(match kind {
        AgentKind::GoldFol => {
            let insts = instances.ok_or_else(|| Usage("gold-fol needs --dataset".into()))?;
            agents::gold_fol(&insts, cfg.budget)
        }
        AgentKind::Scripted => {
            let table: BTreeMap<String, String> = match (script, instances) {
                (Some(p), _) => serde_json::from_str(&std::fs::read_to_string(p)?)
                    .with_context(|| format!("{} must be a JSON object of strings", p.display()))?,
                (None, Some(insts)) => insts.iter().map(|i| (i.id.clone(), i.expected_label.to_string())).collect(),
                (None, None) => bail!(Usage("scripted needs --script or --dataset".into())),
            };
            agents::scripted(table)
        }
        AgentKind::Delay => agents::delay(Duration::from_millis(delay_ms), answer),
        AgentKind::Crash => agents::crash(),
        AgentKind::Garbage => agents::garbage(),
        AgentKind::Echo => agents::echo(),
    })
}

fn runtime() -> anyhow::Result<tokio::runtime::Runtime> {
    Ok(tokio::runtime::Builder::new_multi_thread().enable_all().build()?)
}

fn serve_cmd(agent: Agent, addr: SocketAddr, err: &mut dyn Write) -> anyhow::Result<i32> {
    let rt = runtime()?;
    rt.block_on(async {
        let name = agent.card.name.clone();
        let server = serve_agent(agent, addr).await?;
        writeln!(err, "{name} agent listening on {}", server.url())?;
        err.flush()?;
        server
            .run_until(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await?;
        Ok(0)
    })
}

fn assess_cmd(
    cfg: &Config,
    dataset: &Path,
    url: &str,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> anyhow::Result<i32> {
    let bytes = std::fs::read(dataset).with_context(|| format!("reading {}", dataset.display()))?;
    let ds = load(cfg, dataset, err)?;
    let tasks: Vec<TaskSpec> = ds.instances.iter().map(TaskSpec::from_instance).collect();
    let rt = runtime()?;
    let artifact = rt.block_on(async {
        let card = Client::new().fetch_card(url, Duration::from_secs(5)).await.ok();
        let ctx = RunContext {
            agent: AgentIdentity {
                endpoint: url.to_string(),
                card,
            },
            dataset: DatasetIdentity::from_bytes(dataset.display().to_string(), tasks.len(), &bytes),
            config: cfg.snapshot(),
            output: cfg.artifact_out.clone(),
        };
        run_benchmark(&tasks, &HttpAgent::new(url), &cfg.assess, cfg.concurrency, &ctx).await
    })?;
    write!(out, "{}", render_table(&artifact))?;
    if let Some(p) = &cfg.artifact_out {
        writeln!(err, "artifact written to {}", p.display())?;
    }
    Ok(0)
}

fn synth_cmd(
    cfg: &Config,
    count: usize,
    seed: u64,
    corrupt_seed: Option<u64>,
    log_path: Option<&Path>,
    out_path: Option<&Path>,
    out: &mut dyn Write,
) -> anyhow::Result<i32> {
    if count == 0 {
        return Err(Usage("--count must be positive".into()).into());
    }
    let mut instances = synth::synthetic_dataset(count, seed);
    if let Some(s) = corrupt_seed {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(s);
        let (bad, log) = corrupt::corrupt_dataset(&instances, &Verifier::new(cfg.budget), &mut rng);
        instances = bad;
        if let Some(p) = log_path {
            let lines: Vec<String> = log.iter().map(serde_json::to_string).collect::<Result<_, _>>()?;
            std::fs::write(p, lines.join("\n") + "\n")?;
        }
    }
    let text = datapipe::to_jsonl(&instances, &cfg.fields);
    match out_path {
        Some(p) => std::fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(0)
}
