use serde::{Deserialize, Serialize};

use super::refute::{refute, Budget, SolverVerdict};
use crate::clausal::{clausify, ClausalError};
use crate::fol::{Formula, Label, ValidationError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Consistency {
    Consistent,
    Inconsistent,
    Unknown,
}

/// Three-way verdict plus the evidence behind it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntailmentResult {
    pub label: Label,
    pub premise_consistency: Consistency,
    /// Premises alone.
    pub consistency_check: SolverVerdict,
    /// Premises ∧ ¬conclusion.
    pub check_true: SolverVerdict,
    /// Premises ∧ conclusion.
    pub check_false: SolverVerdict,
    /// Both label checks ended in Unsat or Saturated.
    pub conclusive: bool,
}

impl EntailmentResult {
    /// A result the cleaning pipeline can trust: conclusive with consistent
    /// premises.
    pub fn is_trusted(&self) -> bool {
        self.conclusive && self.premise_consistency == Consistency::Consistent
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EntailError {
    #[error("clause explosion: {clauses} clauses exceed the limit of {limit}")]
    ClauseExplosion { clauses: usize, limit: usize },
    #[error("formula {index} is not a well-formed sentence: {error}")]
    Invalid { index: usize, error: ValidationError },
}

impl From<ClausalError> for EntailError {
    fn from(e: ClausalError) -> Self {
        match e {
            ClausalError::ClauseExplosion { clauses, limit } => {
                EntailError::ClauseExplosion { clauses, limit }
            }
            ClausalError::Invalid { index, error } => EntailError::Invalid { index, error },
        }
    }
}

fn check(formulas: &[Formula], budget: &Budget) -> Result<SolverVerdict, EntailError> {
    let cs = clausify(formulas)?;
    Ok(refute(&cs, budget))
}

/// Decides whether the premises entail the conclusion (`True`), its
/// negation (`False`), or neither (`Uncertain`), by three refutations.
///
/// A budget exhaustion in either label check makes the result
/// inconclusive and counts as "not refuted".
pub fn classify_entailment(
    premises: &[Formula],
    conclusion: &Formula,
    budget: &Budget,
) -> Result<EntailmentResult, EntailError> {
    let consistency_check = check(premises, budget)?;

    let mut with_negation = premises.to_vec();
    with_negation.push(Formula::not(conclusion.clone()));
    let check_true = check(&with_negation, budget)?;

    let mut with_conclusion = premises.to_vec();
    with_conclusion.push(conclusion.clone());
    let check_false = check(&with_conclusion, budget)?;

    let premise_consistency = if consistency_check.is_unsat() {
        Consistency::Inconsistent
    } else if consistency_check.is_saturated() {
        Consistency::Consistent
    } else {
        Consistency::Unknown
    };
    let label = if check_true.is_unsat() {
        Label::True
    } else if check_false.is_unsat() {
        Label::False
    } else {
        Label::Uncertain
    };
    let conclusive = !check_true.is_resource_out() && !check_false.is_resource_out();

    Ok(EntailmentResult {
        label,
        premise_consistency,
        consistency_check,
        check_true,
        check_false,
        conclusive,
    })
}
