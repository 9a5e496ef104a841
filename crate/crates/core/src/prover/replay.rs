//! Independent proof checker: re-derives each recorded step from its
//! parents and checks that the result matches up to variable renaming.

use std::collections::HashMap;

use super::refute::{is_variant, ProofStep};
use super::unify::unify_atoms;
use crate::clausal::{ClauseSet, Literal, Provenance};
use crate::fol::{Atom, Term};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReplayError {
    #[error("derivation is empty")]
    Empty,
    #[error("derivation does not end in the empty clause")]
    NoContradiction,
    #[error("step {0} cites a parent that is not recorded earlier")]
    MissingParent(usize),
    #[error("step {0} claims to be input clause but does not match the clause set")]
    NotAnInput(usize),
    #[error("step {0} cannot be re-derived from its parents")]
    BadInference(usize),
}

fn rename_apart(lits: &[Literal]) -> Vec<Literal> {
    fn t(x: &Term) -> Term {
        match x {
            Term::Var(v) => Term::Var(format!("{v}#r")),
            Term::Const(_) => x.clone(),
            Term::App(f, a) => Term::App(f.clone(), a.iter().map(t).collect()),
        }
    }
    lits.iter()
        .map(|l| Literal {
            positive: l.positive,
            atom: Atom::new(l.atom.predicate.clone(), l.atom.args.iter().map(t).collect()),
        })
        .collect()
}

fn set_eq_variant(computed: Vec<Literal>, recorded: &[Literal]) -> bool {
    let mut uniq: Vec<Literal> = Vec::new();
    for l in computed {
        if !uniq.contains(&l) {
            uniq.push(l);
        }
    }
    is_variant(&uniq, recorded)
}

pub fn verify_derivation(cs: &ClauseSet, proof: &[ProofStep]) -> Result<(), ReplayError> {
    let last = proof.last().ok_or(ReplayError::Empty)?;
    if !last.literals.is_empty() {
        return Err(ReplayError::NoContradiction);
    }
    let mut seen: HashMap<usize, &[Literal]> = HashMap::new();
    for step in proof {
        let parent = |id: usize| seen.get(&id).copied().ok_or(ReplayError::MissingParent(step.id));
        match step.provenance {
            Provenance::Input { .. } => {
                let original = cs.clauses.get(step.id).ok_or(ReplayError::NotAnInput(step.id))?;
                if !set_eq_variant(original.literals.clone(), &step.literals) {
                    return Err(ReplayError::NotAnInput(step.id));
                }
            }
            Provenance::Resolvent {
                left,
                left_literal,
                right,
                right_literal,
            } => {
                let l = parent(left)?;
                let r = rename_apart(parent(right)?);
                let (a, b) = match (l.get(left_literal), r.get(right_literal)) {
                    (Some(a), Some(b)) => (a, b),
                    _ => return Err(ReplayError::BadInference(step.id)),
                };
                if a.positive == b.positive {
                    return Err(ReplayError::BadInference(step.id));
                }
                let sigma = unify_atoms(&a.atom, &b.atom).ok_or(ReplayError::BadInference(step.id))?;
                let computed: Vec<Literal> = l
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != left_literal)
                    .map(|(_, x)| x)
                    .chain(r.iter().enumerate().filter(|&(k, _)| k != right_literal).map(|(_, x)| x))
                    .map(|x| sigma.apply_literal(x))
                    .collect();
                if !set_eq_variant(computed, &step.literals) {
                    return Err(ReplayError::BadInference(step.id));
                }
            }
            Provenance::Factor {
                parent: p,
                first,
                second,
            } => {
                let lits = parent(p)?;
                let (a, b) = match (lits.get(first), lits.get(second)) {
                    (Some(a), Some(b)) if a.positive == b.positive => (a, b),
                    _ => return Err(ReplayError::BadInference(step.id)),
                };
                let sigma = unify_atoms(&a.atom, &b.atom).ok_or(ReplayError::BadInference(step.id))?;
                let computed: Vec<Literal> = lits.iter().map(|x| sigma.apply_literal(x)).collect();
                if !set_eq_variant(computed, &step.literals) {
                    return Err(ReplayError::BadInference(step.id));
                }
            }
        }
        seen.insert(step.id, &step.literals);
    }
    Ok(())
}
