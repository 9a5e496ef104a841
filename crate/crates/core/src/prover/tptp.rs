//! TPTP FOF export, SZS status parsing, and a child-process bridge to an
//! external prover.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::File;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::fol::{Atom, Formula, Label, Term};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TptpError {
    #[error("symbol `{symbol}` maps to `{mapped}`, which is already taken by `{other}`")]
    UnmappableSymbol {
        symbol: String,
        mapped: String,
        other: String,
    },
}

/// Reversible name mapping from our identifiers to TPTP-legal ones.
#[derive(Debug, Default)]
struct NameMap {
    functors: BTreeMap<String, String>,
    functor_owner: BTreeMap<String, String>,
    variables: BTreeMap<String, String>,
    variable_owner: BTreeMap<String, String>,
}

fn tptp_functor(name: &str) -> String {
    let lowered: String = name
        .chars()
        .map(|c| if c == '-' { '_' } else { c.to_ascii_lowercase() })
        .collect();
    if lowered.starts_with(|c: char| c.is_ascii_lowercase()) {
        lowered
    } else {
        format!("s{lowered}")
    }
}

fn tptp_variable(name: &str) -> String {
    let mut out: String = name.chars().map(|c| if c == '-' { '_' } else { c }).collect();
    match out.chars().next() {
        Some(c) if c.is_ascii_alphabetic() => {
            let upper = c.to_ascii_uppercase().to_string();
            out.replace_range(..1, &upper);
            out
        }
        _ => format!("V{out}"),
    }
}

impl NameMap {
    fn functor(&mut self, name: &str) -> Result<String, TptpError> {
        if let Some(m) = self.functors.get(name) {
            return Ok(m.clone());
        }
        let mapped = tptp_functor(name);
        if let Some(other) = self.functor_owner.get(&mapped) {
            return Err(TptpError::UnmappableSymbol {
                symbol: name.to_string(),
                mapped,
                other: other.clone(),
            });
        }
        self.functor_owner.insert(mapped.clone(), name.to_string());
        self.functors.insert(name.to_string(), mapped.clone());
        Ok(mapped)
    }

    fn variable(&mut self, name: &str) -> Result<String, TptpError> {
        if let Some(m) = self.variables.get(name) {
            return Ok(m.clone());
        }
        let mapped = tptp_variable(name);
        if let Some(other) = self.variable_owner.get(&mapped) {
            return Err(TptpError::UnmappableSymbol {
                symbol: name.to_string(),
                mapped,
                other: other.clone(),
            });
        }
        self.variable_owner.insert(mapped.clone(), name.to_string());
        self.variables.insert(name.to_string(), mapped.clone());
        Ok(mapped)
    }

    fn term(&mut self, t: &Term, out: &mut String) -> Result<(), TptpError> {
        match t {
            Term::Var(v) => out.push_str(&self.variable(v)?),
            Term::Const(c) => out.push_str(&self.functor(c)?),
            Term::App(f, args) => {
                out.push_str(&self.functor(f)?);
                self.args(args, out)?;
            }
        }
        Ok(())
    }

    fn args(&mut self, args: &[Term], out: &mut String) -> Result<(), TptpError> {
        out.push('(');
        for (i, a) in args.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            self.term(a, out)?;
        }
        out.push(')');
        Ok(())
    }

    fn atom(&mut self, a: &Atom, out: &mut String) -> Result<(), TptpError> {
        out.push_str(&self.functor(&a.predicate)?);
        if !a.args.is_empty() {
            self.args(&a.args, out)?;
        }
        Ok(())
    }

    /// Writes `f`, parenthesized unless it is an atom or a negated atom.
    fn operand(&mut self, f: &Formula, out: &mut String) -> Result<(), TptpError> {
        let bare = match f {
            Formula::Atom(_) => true,
            Formula::Not(g) => matches!(**g, Formula::Atom(_)),
            _ => false,
        };
        if bare {
            self.formula(f, out)
        } else {
            out.push('(');
            self.formula(f, out)?;
            out.push(')');
            Ok(())
        }
    }

    fn formula(&mut self, f: &Formula, out: &mut String) -> Result<(), TptpError> {
        match f {
            Formula::Atom(a) => self.atom(a, out)?,
            Formula::Not(g) => {
                out.push_str("~ ");
                self.operand(g, out)?;
            }
            Formula::And(gs) | Formula::Or(gs) => {
                let sep = if matches!(f, Formula::And(_)) { " & " } else { " | " };
                for (i, g) in gs.iter().enumerate() {
                    if i > 0 {
                        out.push_str(sep);
                    }
                    self.operand(g, out)?;
                }
            }
            Formula::Implies(a, b) | Formula::Iff(a, b) | Formula::Xor(a, b) => {
                let op = match f {
                    Formula::Implies(..) => " => ",
                    Formula::Iff(..) => " <=> ",
                    _ => " <~> ",
                };
                self.operand(a, out)?;
                out.push_str(op);
                self.operand(b, out)?;
            }
            Formula::Forall(v, g) | Formula::Exists(v, g) => {
                let q = if matches!(f, Formula::Forall(..)) { '!' } else { '?' };
                let var = self.variable(v)?;
                let _ = write!(out, "{q} [{var}] : ");
                self.operand(g, out)?;
            }
        }
        Ok(())
    }
}

/// Renders a TPTP FOF problem: `fof(ax<i>, axiom, ..)` per premise and
/// `fof(c, conjecture, ..)` when a conjecture is given. The name mapping
/// is listed in leading `%` comments.
pub fn export_tptp(premises: &[Formula], conjecture: Option<&Formula>) -> Result<String, TptpError> {
    let mut names = NameMap::default();
    let mut body = String::new();
    for (i, p) in premises.iter().enumerate() {
        let mut line = String::new();
        names.formula(p, &mut line)?;
        let _ = writeln!(body, "fof(ax{i}, axiom, {line}).");
    }
    if let Some(c) = conjecture {
        let mut line = String::new();
        names.formula(c, &mut line)?;
        let _ = writeln!(body, "fof(c, conjecture, {line}).");
    }

    let mut out = String::from("% TPTP FOF problem written by entailbench\n");
    for (ours, theirs) in &names.functors {
        let _ = writeln!(out, "% symbol {theirs} = {ours}");
    }
    for (ours, theirs) in &names.variables {
        let _ = writeln!(out, "% variable {theirs} = {ours}");
    }
    out.push_str(&body);
    Ok(out)
}

/// Verdict reported on an `SZS status` line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SzsStatus {
    Theorem,
    CounterSatisfiable,
    Satisfiable,
    Unsatisfiable,
    Timeout,
    Unknown,
}

/// Finds the first `SZS status <value>` in prover output.
pub fn parse_szs(output: &str) -> SzsStatus {
    for line in output.lines() {
        let Some(idx) = line.find("SZS status") else {
            continue;
        };
        let value = line[idx + "SZS status".len()..].split_whitespace().next().unwrap_or("");
        return match value {
            "Theorem" => SzsStatus::Theorem,
            // Contradictory axioms entail any conjecture.
            "ContradictoryAxioms" => SzsStatus::Theorem,
            "CounterSatisfiable" => SzsStatus::CounterSatisfiable,
            "Satisfiable" => SzsStatus::Satisfiable,
            "Unsatisfiable" => SzsStatus::Unsatisfiable,
            "Timeout" | "TimeOut" | "ResourceOut" => SzsStatus::Timeout,
            _ => SzsStatus::Unknown,
        };
    }
    SzsStatus::Unknown
}

#[derive(Debug, thiserror::Error)]
pub enum ExternalError {
    #[error("cannot run external prover {path}: {source}")]
    Spawn {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("I/O while talking to the external prover: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Tptp(#[from] TptpError),
}

/// An external TPTP prover run as `<path> [args..] <problem.p>`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExternalProver {
    pub path: PathBuf,
    #[serde(default)]
    pub args: Vec<String>,
}

impl ExternalProver {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        ExternalProver {
            path: path.into(),
            args: Vec::new(),
        }
    }

    /// Prover configured through `ENTAILBENCH_TPTP_PROVER`, if any. Extra
    /// arguments may follow the path, separated by whitespace.
    pub fn from_env() -> Option<Self> {
        let spec = std::env::var("ENTAILBENCH_TPTP_PROVER").ok()?;
        let mut parts = spec.split_whitespace();
        let path = parts.next()?;
        Some(ExternalProver {
            path: PathBuf::from(path),
            args: parts.map(str::to_string).collect(),
        })
    }

    /// Runs the prover on `problem`; a run past `timeout` is killed and
    /// reported as [`SzsStatus::Timeout`].
    pub fn run(&self, problem: &str, timeout: Duration) -> Result<(SzsStatus, String), ExternalError> {
        let dir = std::env::temp_dir().join(format!("entailbench-{}", uuid::Uuid::new_v4()));
        std::fs::create_dir_all(&dir)?;
        let result = self.run_in(&dir, problem, timeout);
        let _ = std::fs::remove_dir_all(&dir);
        result
    }

    fn run_in(&self, dir: &Path, problem: &str, timeout: Duration) -> Result<(SzsStatus, String), ExternalError> {
        let input = dir.join("problem.p");
        let output = dir.join("stdout.txt");
        std::fs::write(&input, problem)?;
        let mut child = Command::new(&self.path)
            .args(&self.args)
            .arg(&input)
            .stdin(Stdio::null())
            .stdout(File::create(&output)?)
            .stderr(Stdio::null())
            .spawn()
            .map_err(|source| ExternalError::Spawn {
                path: self.path.clone(),
                source,
            })?;
        let started = Instant::now();
        loop {
            if child.try_wait()?.is_some() {
                break;
            }
            if started.elapsed() >= timeout {
                let _ = child.kill();
                let _ = child.wait();
                let text = std::fs::read_to_string(&output).unwrap_or_default();
                return Ok((SzsStatus::Timeout, text));
            }
            std::thread::sleep(Duration::from_millis(10));
        }
        let text = std::fs::read_to_string(&output)?;
        Ok((parse_szs(&text), text))
    }

    /// Three-way classification through the external prover: `True` when
    /// the conclusion is a theorem, `False` when its negation is, otherwise
    /// `Uncertain`.
    pub fn classify(
        &self,
        premises: &[Formula],
        conclusion: &Formula,
        timeout: Duration,
    ) -> Result<Label, ExternalError> {
        let positive = export_tptp(premises, Some(conclusion))?;
        if self.run(&positive, timeout)?.0 == SzsStatus::Theorem {
            return Ok(Label::True);
        }
        let negated = Formula::not(conclusion.clone());
        let negative = export_tptp(premises, Some(&negated))?;
        if self.run(&negative, timeout)?.0 == SzsStatus::Theorem {
            return Ok(Label::False);
        }
        Ok(Label::Uncertain)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fol::parse_formula;

    fn p(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn axiom_and_conjecture_lines() {
        let text = export_tptp(&[p("∀x (P(x) → Q(x))")], Some(&p("Q(a)"))).unwrap();
        assert!(text.contains("fof(ax0, axiom, ! [X] : (p(X) => q(X)))."), "{text}");
        assert!(text.contains("fof(c, conjecture, q(a))."), "{text}");
        assert!(text.contains("% symbol p = P"));
        assert!(text.contains("% variable X = x"));
    }

    #[test]
    fn no_conjecture() {
        let text = export_tptp(&[p("P(a)")], None).unwrap();
        let fof: Vec<&str> = text.lines().filter(|l| l.starts_with("fof(")).collect();
        assert_eq!(fof, vec!["fof(ax0, axiom, p(a))."]);
    }

    #[test]
    fn illegal_names_are_mapped() {
        let text = export_tptp(&[p("Is-Tall(bob)")], None).unwrap();
        assert!(text.contains("fof(ax0, axiom, is_tall(bob))."));
        assert!(text.contains("% symbol is_tall = Is-Tall"));
    }

    #[test]
    fn colliding_names_are_rejected() {
        let err = export_tptp(&[p("IsTall(a) ∧ istall(b)")], None).unwrap_err();
        assert!(matches!(err, TptpError::UnmappableSymbol { .. }));
    }

    #[test]
    fn connectives() {
        let text = export_tptp(&[p("¬(A ∧ B) ↔ (C ⊕ ∃y R(y, y))")], None).unwrap();
        assert!(text.contains("fof(ax0, axiom, (~ (a & b)) <=> (c <~> (? [Y] : r(Y,Y))))."), "{text}");
    }

    #[test]
    fn deterministic() {
        let ps = vec![p("∀x (Dog(x) → Animal(x))"), p("Dog(rex)")];
        assert_eq!(export_tptp(&ps, Some(&p("Animal(rex)"))), export_tptp(&ps, Some(&p("Animal(rex)"))));
    }

    #[test]
    fn szs_lines() {
        assert_eq!(parse_szs("% SZS status Theorem for problem"), SzsStatus::Theorem);
        assert_eq!(parse_szs(""), SzsStatus::Unknown);
        assert_eq!(parse_szs("% SZS status CounterSatisfiable"), SzsStatus::CounterSatisfiable);
        assert_eq!(parse_szs("noise\n% SZS status TimeOut for x\n"), SzsStatus::Timeout);
        assert_eq!(parse_szs("% SZS status GaveUp"), SzsStatus::Unknown);
    }

    #[cfg(unix)]
    #[test]
    fn subprocess_bridge_with_a_stub_prover() {
        use std::os::unix::fs::PermissionsExt;
        let dir = std::env::temp_dir().join(format!("eb-stub-{}", uuid::Uuid::new_v4()));
        std::fs::create_dir_all(&dir).unwrap();
        let script = dir.join("stub.sh");
        // Claims a theorem whenever the conjecture mentions q(a).
        std::fs::write(
            &script,
            "#!/bin/sh\nif grep -q 'conjecture, q(a)' \"$1\"; then echo '% SZS status Theorem for p'; else echo '% SZS status CounterSatisfiable for p'; fi\n",
        )
        .unwrap();
        std::fs::set_permissions(&script, std::fs::Permissions::from_mode(0o755)).unwrap();
        let prover = ExternalProver::new(&script);
        let label = prover
            .classify(&[p("P(a)")], &p("Q(a)"), Duration::from_secs(5))
            .unwrap();
        assert_eq!(label, Label::True);
        let label = prover
            .classify(&[p("P(a)")], &p("Q(b)"), Duration::from_secs(5))
            .unwrap();
        assert_eq!(label, Label::Uncertain);

        let slow = dir.join("slow.sh");
        std::fs::write(&slow, "#!/bin/sh\nsleep 5\n").unwrap();
        std::fs::set_permissions(&slow, std::fs::Permissions::from_mode(0o755)).unwrap();
        let started = Instant::now();
        let (status, _) = ExternalProver::new(&slow).run("", Duration::from_millis(200)).unwrap();
        assert_eq!(status, SzsStatus::Timeout);
        assert!(started.elapsed() < Duration::from_secs(3));
        let _ = std::fs::remove_dir_all(&dir);
    }
}
