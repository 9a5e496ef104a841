//! Reference agents under test, one per assessment path.

use std::collections::{BTreeMap, HashMap};
use std::time::Duration;

use super::{Agent, AgentCard, TaskMessage};
use crate::datapipe::{DatasetInstance, Verifier};
use crate::fol::render;
use crate::prover::Budget;

/// Instance id carried in a task id of the form `<instance>:<attempt>`.
pub fn instance_of(task_id: &str) -> &str {
    task_id.rsplit_once(':').map_or(task_id, |(id, _)| id)
}

fn nl_key(premises: &[String], conclusion: &str) -> String {
    let mut key: Vec<&str> = premises.iter().map(|p| p.trim()).collect();
    key.push("--");
    key.push(conclusion.trim());
    key.join("\n")
}

/// Looks up the task's FOL annotation by its NL text, runs the prover on
/// it and answers with its formalization, then the label on the last line.
pub fn gold_fol(instances: &[DatasetInstance], budget: Budget) -> Agent {
    let index: HashMap<String, DatasetInstance> = instances
        .iter()
        .map(|i| (nl_key(&i.premises_nl, &i.conclusion_nl), i.clone()))
        .collect();
    let verifier = Verifier::new(budget);
    Agent::new(AgentCard::new("gold-fol"), move |task: &TaskMessage| {
        let inst = index
            .get(&nl_key(&task.premises, &task.conclusion))
            .ok_or_else(|| "no annotation matches this task".to_string())?;
        let (premises, conclusion) = verifier.parse(inst).map_err(|e| e.to_string())?;
        let result = crate::prover::classify_entailment(&premises, &conclusion, &verifier.budget)
            .map_err(|e| e.to_string())?;
        let mut out = String::from("Premises:\n");
        for p in &premises {
            out.push_str(&format!("  {}\n", render(p)));
        }
        out.push_str(&format!("Conclusion:\n  {}\n{}", render(&conclusion), result.label));
        Ok(out)
    })
}

/// Answers from a fixed instance-id table.
pub fn scripted(answers: BTreeMap<String, String>) -> Agent {
    Agent::new(AgentCard::new("scripted"), move |task: &TaskMessage| {
        let id = instance_of(&task.task_id);
        answers
            .get(id)
            .cloned()
            .ok_or_else(|| format!("no scripted answer for {id}"))
    })
}

/// Sleeps `delay`, then answers `answer`.
pub fn delay(delay: Duration, answer: String) -> Agent {
    Agent::new(AgentCard::new("delay"), move |_: &TaskMessage| {
        std::thread::sleep(delay);
        Ok(answer.clone())
    })
}

pub fn crash() -> Agent {
    Agent::new(AgentCard::new("crash"), |_: &TaskMessage| {
        Err("agent crashed before answering".to_string())
    })
}

/// Answers without any valid final label line.
pub fn garbage() -> Agent {
    Agent::new(AgentCard::new("garbage"), |_: &TaskMessage| {
        Ok("Let me think.\nThe answer is clearly banana.".to_string())
    })
}

/// Renders the task back as text.
pub fn echo() -> Agent {
    Agent::new(AgentCard::new("echo"), |task: &TaskMessage| {
        let mut out = task.premises.join("\n");
        out.push_str("\n--\n");
        out.push_str(&task.conclusion);
        Ok(out)
    })
}
