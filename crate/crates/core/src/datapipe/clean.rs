use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::repair::{Diagnosis, Repairer};
use super::{Dataset, DatasetInstance, FieldMap, Verifier};
use crate::stats::percent;

/// Default repair rounds before an instance is flagged.
pub const DEFAULT_MAX_ITERS: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "category", rename_all = "snake_case")]
pub enum Category {
    VerifiedDirect,
    VerifiedAfterRepair { iterations: usize, repairs: Vec<String> },
    Problematic { reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinalFol {
    pub premises_fol: Vec<String>,
    pub conclusion_fol: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleaningOutcome {
    pub id: String,
    #[serde(flatten)]
    pub category: Category,
    /// Repaired annotations, present only after a successful repair.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_fol: Option<FinalFol>,
}

impl CleaningOutcome {
    /// The instance as it stands after cleaning.
    pub fn apply_to(&self, inst: &DatasetInstance) -> DatasetInstance {
        match &self.final_fol {
            Some(f) => DatasetInstance {
                premises_fol: f.premises_fol.clone(),
                conclusion_fol: f.conclusion_fol.clone(),
                ..inst.clone()
            },
            None => inst.clone(),
        }
    }
}

/// Verify, then critique → refine → re-verify up to `max_iters` rounds.
///
/// Within a round candidates are tried in order and the first one that
/// parses and verifies wins. If none verifies, the first candidate that at
/// least parses is carried into the next round.
pub fn clean_instance(
    inst: &DatasetInstance,
    repairer: &dyn Repairer,
    max_iters: usize,
    verifier: &Verifier,
) -> CleaningOutcome {
    let outcome = |category, final_fol| CleaningOutcome {
        id: inst.id.clone(),
        category,
        final_fol,
    };
    let mut diagnosis = match verifier.verify(inst) {
        Ok(r) if r.matches_expected => return outcome(Category::VerifiedDirect, None),
        Ok(r) => Diagnosis::Mismatch(r),
        Err(t) => Diagnosis::Trigger(t),
    };
    let mut current = inst.clone();
    let mut trail: Vec<String> = Vec::new();
    for iteration in 1..=max_iters.max(1) {
        let critique = repairer.critique(&current, &diagnosis);
        let candidates = repairer.refine(&current, &critique);
        let mut carry = None;
        for cand in candidates {
            let next = cand.apply_to(&current);
            match verifier.verify(&next) {
                Ok(r) if r.matches_expected => {
                    trail.extend(cand.notes);
                    let fol = FinalFol {
                        premises_fol: next.premises_fol,
                        conclusion_fol: next.conclusion_fol,
                    };
                    return outcome(
                        Category::VerifiedAfterRepair {
                            iterations: iteration,
                            repairs: trail,
                        },
                        Some(fol),
                    );
                }
                Ok(r) if carry.is_none() => carry = Some((next, cand.notes, Diagnosis::Mismatch(r))),
                Ok(_) => {}
                Err(t) => {
                    if carry.is_none() && verifier.parse(&next).is_ok() {
                        carry = Some((next, cand.notes, Diagnosis::Trigger(t)));
                    }
                }
            }
        }
        match carry {
            Some((next, notes, d)) => {
                current = next;
                trail.extend(notes);
                diagnosis = d;
            }
            None => break,
        }
    }
    outcome(
        Category::Problematic {
            reason: diagnosis.to_string(),
        },
        None,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CategoryCount {
    pub count: usize,
    /// One decimal, half-up.
    pub percent: f64,
}

/// Three-category summary. Percentages are recomputed from counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CleaningReport {
    pub schema_version: u32,
    pub total: usize,
    pub verified_direct: CategoryCount,
    pub verified_after_repair: CategoryCount,
    pub problematic: CategoryCount,
    pub problematic_ids: Vec<String>,
}

impl CleaningReport {
    pub fn from_counts(direct: usize, repaired: usize, problematic: usize, problematic_ids: Vec<String>) -> Self {
        let total = direct + repaired + problematic;
        let cat = |count: usize| CategoryCount {
            count,
            percent: percent(count as u64, total as u64, 1),
        };
        CleaningReport {
            schema_version: 1,
            total,
            verified_direct: cat(direct),
            verified_after_repair: cat(repaired),
            problematic: cat(problematic),
            problematic_ids,
        }
    }

    pub fn from_outcomes(outcomes: &[CleaningOutcome]) -> Self {
        let (mut d, mut r) = (0, 0);
        let mut ids = Vec::new();
        for o in outcomes {
            match o.category {
                Category::VerifiedDirect => d += 1,
                Category::VerifiedAfterRepair { .. } => r += 1,
                Category::Problematic { .. } => ids.push(o.id.clone()),
            }
        }
        ids.sort();
        Self::from_counts(d, r, ids.len(), ids)
    }
}

/// Cleans every instance on up to `workers` threads; outcomes come back
/// sorted by id, so the result does not depend on scheduling.
pub fn clean_dataset(
    instances: &[DatasetInstance],
    repairer: &dyn Repairer,
    max_iters: usize,
    verifier: &Verifier,
    workers: usize,
) -> (Vec<CleaningOutcome>, CleaningReport) {
    let next = AtomicUsize::new(0);
    let results = Mutex::new(Vec::with_capacity(instances.len()));
    std::thread::scope(|s| {
        for _ in 0..workers.clamp(1, instances.len().max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(inst) = instances.get(i) else { break };
                let o = clean_instance(inst, repairer, max_iters, verifier);
                results.lock().expect("no worker panicked").push(o);
            });
        }
    });
    let mut outcomes = results.into_inner().expect("no worker panicked");
    outcomes.sort_by(|a, b| a.id.cmp(&b.id));
    let report = CleaningReport::from_outcomes(&outcomes);
    (outcomes, report)
}

/// Output lines mirroring the input records: FOL fields replaced by their
/// repaired versions (keeping the input's string-or-list shape) and a
/// `cleaning` object added.
pub fn mirror_jsonl(ds: &Dataset, outcomes: &[CleaningOutcome], map: &FieldMap) -> String {
    let by_id: BTreeMap<&str, &CleaningOutcome> = outcomes.iter().map(|o| (o.id.as_str(), o)).collect();
    let mut out = String::new();
    for (inst, raw) in ds.instances.iter().zip(&ds.raw) {
        let mut obj: Map<String, Value> = raw.clone();
        if let Some(o) = by_id.get(inst.id.as_str()) {
            if let Some(f) = &o.final_fol {
                let premises = match raw.get(&map.premises_fol) {
                    Some(Value::String(_)) => Value::from(f.premises_fol.join("\n")),
                    _ => Value::from(f.premises_fol.clone()),
                };
                obj.insert(map.premises_fol.clone(), premises);
                obj.insert(map.conclusion_fol.clone(), Value::from(f.conclusion_fol.clone()));
            }
            let mut cleaning = serde_json::to_value(&o.category).expect("serializable");
            if let Value::Object(c) = &mut cleaning {
                c.remove("id");
            }
            obj.insert("cleaning".into(), cleaning);
        }
        out.push_str(&Value::Object(obj).to_string());
        out.push('\n');
    }
    out
}
