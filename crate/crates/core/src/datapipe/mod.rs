//! Dataset ingestion, solver verification, and the verify-and-repair
//! cleaning loop.

mod clean;
pub mod corrupt;
mod repair;
pub mod synth;

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::fol::{self, parse_formula, Formula, Label, SyntaxError, ValidationError};
use crate::prover::{classify_entailment, Budget, EntailError, EntailmentResult};

pub use clean::{
    clean_dataset, clean_instance, mirror_jsonl, Category, CategoryCount, CleaningOutcome, CleaningReport, FinalFol,
    DEFAULT_MAX_ITERS,
};
pub use repair::{
    naming_key, repair_lexical, repair_naming, repair_parentheses, Candidate, CorpusSignature, Critique,
    DefectClass, Diagnosis, NoCandidate, Repairer, RuleRepairer, Suspect, SymbolKey,
};

/// One entailment question with its natural-language text and FOL
/// annotation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetInstance {
    pub id: String,
    pub premises_nl: Vec<String>,
    pub premises_fol: Vec<String>,
    pub conclusion_nl: String,
    pub conclusion_fol: String,
    pub expected_label: Label,
}

impl DatasetInstance {
    pub fn fol_fields(&self) -> impl Iterator<Item = (FolField, &str)> {
        self.premises_fol
            .iter()
            .enumerate()
            .map(|(i, s)| (FolField::Premise(i), s.as_str()))
            .chain(std::iter::once((FolField::Conclusion, self.conclusion_fol.as_str())))
    }

    pub fn fol(&self, field: FolField) -> &str {
        match field {
            FolField::Premise(i) => &self.premises_fol[i],
            FolField::Conclusion => &self.conclusion_fol,
        }
    }

    pub fn fol_mut(&mut self, field: FolField) -> &mut String {
        match field {
            FolField::Premise(i) => &mut self.premises_fol[i],
            FolField::Conclusion => &mut self.conclusion_fol,
        }
    }
}

/// Which FOL annotation of an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FolField {
    Premise(usize),
    Conclusion,
}

impl std::fmt::Display for FolField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FolField::Premise(i) => write!(f, "premise {i}"),
            FolField::Conclusion => f.write_str("conclusion"),
        }
    }
}

/// JSON keys for each instance field. Defaults follow the public FOLIO
/// release.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldMap {
    pub id: String,
    pub premises_nl: String,
    pub premises_fol: String,
    pub conclusion_nl: String,
    pub conclusion_fol: String,
    pub label: String,
}

impl Default for FieldMap {
    fn default() -> Self {
        FieldMap {
            id: "example_id".into(),
            premises_nl: "premises".into(),
            premises_fol: "premises-FOL".into(),
            conclusion_nl: "conclusion".into(),
            conclusion_fol: "conclusion-FOL".into(),
            label: "label".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, thiserror::Error)]
#[error("line {line}: {cause}")]
pub struct IngestError {
    pub line: usize,
    pub cause: String,
}

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("cannot read dataset: {0}")]
    Io(#[from] std::io::Error),
    #[error("no instance could be loaded ({} line errors)", .errors.len())]
    NothingLoaded { errors: Vec<IngestError> },
}

/// A loaded dataset: instances, the raw JSON object each came from (for
/// mirroring output), and per-line errors.
#[derive(Debug, Clone, Default)]
pub struct Dataset {
    pub instances: Vec<DatasetInstance>,
    pub raw: Vec<Map<String, Value>>,
    pub errors: Vec<IngestError>,
}

fn text_list(v: &Value) -> Option<Vec<String>> {
    match v {
        Value::String(s) => Some(s.lines().map(str::trim).filter(|l| !l.is_empty()).map(String::from).collect()),
        Value::Array(items) => items.iter().map(|i| i.as_str().map(String::from)).collect(),
        _ => None,
    }
}

fn instance_from(obj: &Map<String, Value>, map: &FieldMap) -> Result<DatasetInstance, String> {
    let get = |key: &str| obj.get(key).ok_or_else(|| format!("missing field `{key}`"));
    let id = match get(&map.id)? {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        _ => return Err(format!("field `{}` must be a string or number", map.id)),
    };
    let premises_nl = text_list(get(&map.premises_nl)?)
        .ok_or_else(|| format!("field `{}` must be text or a list of text", map.premises_nl))?;
    let premises_fol = text_list(get(&map.premises_fol)?)
        .ok_or_else(|| format!("field `{}` must be text or a list of text", map.premises_fol))?;
    if premises_nl.len() != premises_fol.len() {
        return Err(format!(
            "{} natural-language premises but {} FOL premises",
            premises_nl.len(),
            premises_fol.len()
        ));
    }
    let text = |key: &str| -> Result<String, String> {
        get(key)?
            .as_str()
            .map(|s| s.trim().to_string())
            .ok_or_else(|| format!("field `{key}` must be text"))
    };
    let label_text = text(&map.label)?;
    let expected_label = label_text
        .parse::<Label>()
        .map_err(|e| format!("field `{}`: {e}", map.label))?;
    Ok(DatasetInstance {
        id,
        premises_nl,
        premises_fol,
        conclusion_nl: text(&map.conclusion_nl)?,
        conclusion_fol: text(&map.conclusion_fol)?,
        expected_label,
    })
}

/// Parses JSON-lines text. Blank lines are skipped; malformed lines are
/// collected in [`Dataset::errors`].
pub fn parse_dataset(text: &str, map: &FieldMap) -> Result<Dataset, DatasetError> {
    let mut ds = Dataset::default();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let parsed = serde_json::from_str::<Value>(line)
            .map_err(|e| format!("invalid JSON: {e}"))
            .and_then(|v| match v {
                Value::Object(obj) => Ok(obj),
                _ => Err("expected a JSON object".to_string()),
            })
            .and_then(|obj| instance_from(&obj, map).map(|inst| (inst, obj)));
        match parsed {
            Ok((inst, obj)) => {
                ds.instances.push(inst);
                ds.raw.push(obj);
            }
            Err(cause) => ds.errors.push(IngestError { line: line_no, cause }),
        }
    }
    if ds.instances.is_empty() {
        return Err(DatasetError::NothingLoaded { errors: ds.errors });
    }
    Ok(ds)
}

pub fn load_dataset(path: &Path, map: &FieldMap) -> Result<Dataset, DatasetError> {
    let text = std::fs::read_to_string(path)?;
    parse_dataset(&text, map)
}

/// Serializes instances as JSON lines under `map`'s keys, one premise per
/// array element.
pub fn to_jsonl(instances: &[DatasetInstance], map: &FieldMap) -> String {
    let mut out = String::new();
    for inst in instances {
        let mut obj = Map::new();
        obj.insert(map.id.clone(), Value::from(inst.id.clone()));
        obj.insert(map.premises_nl.clone(), Value::from(inst.premises_nl.clone()));
        obj.insert(map.premises_fol.clone(), Value::from(inst.premises_fol.clone()));
        obj.insert(map.conclusion_nl.clone(), Value::from(inst.conclusion_nl.clone()));
        obj.insert(map.conclusion_fol.clone(), Value::from(inst.conclusion_fol.clone()));
        obj.insert(map.label.clone(), Value::from(inst.expected_label.to_string()));
        out.push_str(&Value::Object(obj).to_string());
        out.push('\n');
    }
    out
}

/// Why an instance could not be checked by the solver at all.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RepairTrigger {
    #[error("{field} does not parse: {error}")]
    Syntax { field: FolField, error: SyntaxError },
    #[error("{field} is not a well-formed sentence: {error}")]
    Invalid { field: FolField, error: ValidationError },
    #[error("annotations disagree on a symbol: {0}")]
    Signature(fol::SignatureError),
    #[error("clause explosion: {clauses} clauses exceed the limit of {limit}")]
    ClauseExplosion { clauses: usize, limit: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub result: EntailmentResult,
    /// Trusted (conclusive, consistent premises) and equal to the label.
    pub matches_expected: bool,
}

/// Shared verification settings.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Verifier {
    pub budget: Budget,
    /// Universally close open annotations before checking.
    pub auto_close: bool,
}

impl Verifier {
    pub fn new(budget: Budget) -> Self {
        Verifier {
            budget,
            auto_close: false,
        }
    }

    /// Parses every annotation, first error wins.
    pub fn parse(&self, inst: &DatasetInstance) -> Result<(Vec<Formula>, Formula), RepairTrigger> {
        let mut parsed = BTreeMap::new();
        for (field, text) in inst.fol_fields() {
            let mut f = parse_formula(text).map_err(|error| RepairTrigger::Syntax { field, error })?;
            if self.auto_close {
                f = fol::universal_closure(&f);
            }
            fol::validate(&f).map_err(|error| RepairTrigger::Invalid { field, error })?;
            parsed.insert(field, f);
        }
        let conclusion = parsed.remove(&FolField::Conclusion).expect("conclusion parsed");
        let premises: Vec<Formula> = parsed.into_values().collect();
        let mut all = premises.clone();
        all.push(conclusion.clone());
        fol::infer_signature(&all).map_err(RepairTrigger::Signature)?;
        Ok((premises, conclusion))
    }

    pub fn verify(&self, inst: &DatasetInstance) -> Result<VerifyReport, RepairTrigger> {
        let (premises, conclusion) = self.parse(inst)?;
        let result = classify_entailment(&premises, &conclusion, &self.budget).map_err(|e| match e {
            EntailError::ClauseExplosion { clauses, limit } => RepairTrigger::ClauseExplosion { clauses, limit },
            // Already validated above; kept total for safety.
            EntailError::Invalid { index, error } => RepairTrigger::Invalid {
                field: if index < premises.len() {
                    FolField::Premise(index)
                } else {
                    FolField::Conclusion
                },
                error,
            },
        })?;
        let matches_expected = result.is_trusted() && result.label == inst.expected_label;
        Ok(VerifyReport {
            result,
            matches_expected,
        })
    }
}

/// Runs the solver on an instance's annotations and compares against its
/// expected label.
pub fn verify_instance(inst: &DatasetInstance, budget: &Budget) -> Result<VerifyReport, RepairTrigger> {
    Verifier::new(*budget).verify(inst)
}
