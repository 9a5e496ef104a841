use std::collections::BTreeSet;

use super::{ClausalError, ClauseSet, Literal, Provenance};
use crate::fol::{validate, Atom, Formula, Term, SKOLEM_PREFIX};

/// Per-instance guard on naive distribution.
pub const DEFAULT_CLAUSE_LIMIT: usize = 10_000;

/// Rewrites `→`, `↔` and `⊕` in terms of `¬`, `∧`, `∨`.
pub fn eliminate_connectives(f: &Formula) -> Formula {
    match f {
        Formula::Atom(_) => f.clone(),
        Formula::Not(g) => Formula::not(eliminate_connectives(g)),
        Formula::And(gs) => Formula::and(gs.iter().map(eliminate_connectives).collect()),
        Formula::Or(gs) => Formula::or(gs.iter().map(eliminate_connectives).collect()),
        Formula::Implies(a, b) => {
            Formula::or(vec![Formula::not(eliminate_connectives(a)), eliminate_connectives(b)])
        }
        Formula::Iff(a, b) => {
            let (a, b) = (eliminate_connectives(a), eliminate_connectives(b));
            Formula::and(vec![
                Formula::or(vec![Formula::not(a.clone()), b.clone()]),
                Formula::or(vec![Formula::not(b), a]),
            ])
        }
        Formula::Xor(a, b) => {
            let (a, b) = (eliminate_connectives(a), eliminate_connectives(b));
            Formula::and(vec![
                Formula::or(vec![a.clone(), b.clone()]),
                Formula::or(vec![Formula::not(a), Formula::not(b)]),
            ])
        }
        Formula::Forall(v, g) => Formula::forall(v.clone(), eliminate_connectives(g)),
        Formula::Exists(v, g) => Formula::exists(v.clone(), eliminate_connectives(g)),
    }
}

/// Pushes negations down to atoms. Any remaining `→`/`↔`/`⊕` are
/// eliminated first.
pub fn to_nnf(f: &Formula) -> Formula {
    nnf(f, true)
}

fn nnf(f: &Formula, positive: bool) -> Formula {
    match f {
        Formula::Atom(_) => {
            if positive {
                f.clone()
            } else {
                Formula::not(f.clone())
            }
        }
        Formula::Not(g) => nnf(g, !positive),
        Formula::And(gs) | Formula::Or(gs) => {
            let parts = gs.iter().map(|g| nnf(g, positive)).collect();
            if matches!(f, Formula::And(_)) == positive {
                Formula::and(parts)
            } else {
                Formula::or(parts)
            }
        }
        Formula::Forall(v, g) | Formula::Exists(v, g) => {
            let body = nnf(g, positive);
            if matches!(f, Formula::Forall(..)) == positive {
                Formula::forall(v.clone(), body)
            } else {
                Formula::exists(v.clone(), body)
            }
        }
        Formula::Implies(..) | Formula::Iff(..) | Formula::Xor(..) => {
            nnf(&eliminate_connectives(f), positive)
        }
    }
}

fn substitute_term(t: &Term, var: &str, by: &Term) -> Term {
    match t {
        Term::Var(v) if v == var => by.clone(),
        Term::App(n, args) => {
            Term::App(n.clone(), args.iter().map(|a| substitute_term(a, var, by)).collect())
        }
        _ => t.clone(),
    }
}

/// Replaces free occurrences of `var` with `by`.
fn substitute(f: &Formula, var: &str, by: &Term) -> Formula {
    match f {
        Formula::Atom(a) => Formula::Atom(Atom::new(
            a.predicate.clone(),
            a.args.iter().map(|t| substitute_term(t, var, by)).collect(),
        )),
        Formula::Not(g) => Formula::not(substitute(g, var, by)),
        Formula::And(gs) => Formula::And(gs.iter().map(|g| substitute(g, var, by)).collect()),
        Formula::Or(gs) => Formula::Or(gs.iter().map(|g| substitute(g, var, by)).collect()),
        Formula::Implies(a, b) => Formula::implies(substitute(a, var, by), substitute(b, var, by)),
        Formula::Iff(a, b) => Formula::iff(substitute(a, var, by), substitute(b, var, by)),
        Formula::Xor(a, b) => Formula::xor(substitute(a, var, by), substitute(b, var, by)),
        Formula::Forall(v, _) | Formula::Exists(v, _) if v == var => f.clone(),
        Formula::Forall(v, g) => Formula::forall(v.clone(), substitute(g, var, by)),
        Formula::Exists(v, g) => Formula::exists(v.clone(), substitute(g, var, by)),
    }
}

/// Renames bound variables so that every quantifier in `fs` binds a distinct
/// name. The first binder of a name keeps it.
pub fn standardize_apart(fs: &[Formula]) -> Vec<Formula> {
    let mut used = BTreeSet::new();
    fs.iter().map(|f| rename_binders(f, &mut used)).collect()
}

fn rename_binders(f: &Formula, used: &mut BTreeSet<String>) -> Formula {
    match f {
        Formula::Atom(_) => f.clone(),
        Formula::Not(g) => Formula::not(rename_binders(g, used)),
        Formula::And(gs) => Formula::And(gs.iter().map(|g| rename_binders(g, used)).collect()),
        Formula::Or(gs) => Formula::Or(gs.iter().map(|g| rename_binders(g, used)).collect()),
        Formula::Implies(a, b) => Formula::implies(rename_binders(a, used), rename_binders(b, used)),
        Formula::Iff(a, b) => Formula::iff(rename_binders(a, used), rename_binders(b, used)),
        Formula::Xor(a, b) => Formula::xor(rename_binders(a, used), rename_binders(b, used)),
        Formula::Forall(v, g) | Formula::Exists(v, g) => {
            let fresh = if used.contains(v) {
                (1..)
                    .map(|i| format!("{v}_{i}"))
                    .find(|n| !used.contains(n))
                    .unwrap()
            } else {
                v.clone()
            };
            used.insert(fresh.clone());
            let body = if fresh == *v {
                (**g).clone()
            } else {
                substitute(g, v, &Term::Var(fresh.clone()))
            };
            let body = rename_binders(&body, used);
            if matches!(f, Formula::Forall(..)) {
                Formula::forall(fresh, body)
            } else {
                Formula::exists(fresh, body)
            }
        }
    }
}

/// Replaces each existential with a fresh Skolem term over the enclosing
/// universal variables: a constant `_sk<n>` when there are none, otherwise
/// `_sk<n>(x1, ..)`. Expects NNF input. Returns the advanced counter.
pub fn skolemize(f: &Formula, counter: usize) -> (Formula, usize) {
    let mut counter = counter;
    let out = skolem_walk(f, &mut Vec::new(), &mut counter);
    (out, counter)
}

fn skolem_walk(f: &Formula, universals: &mut Vec<String>, counter: &mut usize) -> Formula {
    match f {
        Formula::Atom(_) => f.clone(),
        Formula::Not(g) => Formula::not(skolem_walk(g, universals, counter)),
        Formula::And(gs) => Formula::And(gs.iter().map(|g| skolem_walk(g, universals, counter)).collect()),
        Formula::Or(gs) => Formula::Or(gs.iter().map(|g| skolem_walk(g, universals, counter)).collect()),
        Formula::Implies(a, b) => Formula::implies(
            skolem_walk(a, universals, counter),
            skolem_walk(b, universals, counter),
        ),
        Formula::Iff(a, b) => Formula::iff(
            skolem_walk(a, universals, counter),
            skolem_walk(b, universals, counter),
        ),
        Formula::Xor(a, b) => Formula::xor(
            skolem_walk(a, universals, counter),
            skolem_walk(b, universals, counter),
        ),
        Formula::Forall(v, g) => {
            universals.push(v.clone());
            let body = skolem_walk(g, universals, counter);
            universals.pop();
            Formula::forall(v.clone(), body)
        }
        Formula::Exists(v, g) => {
            let name = format!("{SKOLEM_PREFIX}{}", *counter);
            *counter += 1;
            let witness = if universals.is_empty() {
                Term::Const(name)
            } else {
                Term::App(name, universals.iter().cloned().map(Term::Var).collect())
            };
            skolem_walk(&substitute(g, v, &witness), universals, counter)
        }
    }
}

fn drop_universals(f: &Formula) -> Formula {
    match f {
        Formula::Forall(_, g) => drop_universals(g),
        Formula::And(gs) => Formula::and(gs.iter().map(drop_universals).collect()),
        Formula::Or(gs) => Formula::or(gs.iter().map(drop_universals).collect()),
        Formula::Not(g) => Formula::not(drop_universals(g)),
        _ => f.clone(),
    }
}

/// Number of clauses naive distribution would produce.
fn clause_count(f: &Formula) -> usize {
    match f {
        Formula::And(gs) => gs.iter().fold(0usize, |acc, g| acc.saturating_add(clause_count(g))),
        Formula::Or(gs) => gs.iter().fold(1usize, |acc, g| acc.saturating_mul(clause_count(g))),
        _ => 1,
    }
}

fn literal_of(f: &Formula) -> Literal {
    match f {
        Formula::Atom(a) => Literal {
            positive: true,
            atom: a.clone(),
        },
        Formula::Not(g) => match &**g {
            Formula::Atom(a) => Literal {
                positive: false,
                atom: a.clone(),
            },
            other => panic!("not in negation normal form: ¬{other}"),
        },
        other => panic!("expected a literal, found {other}"),
    }
}

fn distribute(f: &Formula) -> Vec<Vec<Literal>> {
    match f {
        Formula::And(gs) => gs.iter().flat_map(distribute).collect(),
        Formula::Or(gs) => {
            let mut acc: Vec<Vec<Literal>> = vec![Vec::new()];
            for g in gs {
                let part = distribute(g);
                let mut next = Vec::with_capacity(acc.len() * part.len());
                for prefix in &acc {
                    for clause in &part {
                        let mut c = prefix.clone();
                        c.extend(clause.iter().cloned());
                        next.push(c);
                    }
                }
                acc = next;
            }
            acc
        }
        _ => vec![vec![literal_of(f)]],
    }
}

pub(crate) fn suffix_literal_vars(lit: &Literal, id: usize) -> Literal {
    fn go(t: &Term, id: usize) -> Term {
        match t {
            Term::Var(v) => Term::Var(format!("{v}_{id}")),
            Term::Const(_) => t.clone(),
            Term::App(n, args) => Term::App(n.clone(), args.iter().map(|a| go(a, id)).collect()),
        }
    }
    Literal {
        positive: lit.positive,
        atom: Atom::new(lit.atom.predicate.clone(), lit.atom.args.iter().map(|t| go(t, id)).collect()),
    }
}

fn is_tautology(lits: &[Literal]) -> bool {
    lits.iter()
        .enumerate()
        .any(|(i, a)| lits[i + 1..].iter().any(|b| a.is_complement_of(b)))
}

/// Equisatisfiable clause set for the conjunction of `fs`, using the
/// default clause-count guard.
pub fn clausify(fs: &[Formula]) -> Result<ClauseSet, ClausalError> {
    clausify_with_limit(fs, DEFAULT_CLAUSE_LIMIT)
}

pub fn clausify_with_limit(fs: &[Formula], limit: usize) -> Result<ClauseSet, ClausalError> {
    for (index, f) in fs.iter().enumerate() {
        validate(f).map_err(|error| ClausalError::Invalid { index, error })?;
    }
    let nnfs: Vec<Formula> = fs.iter().map(|f| to_nnf(&eliminate_connectives(f))).collect();
    let apart = standardize_apart(&nnfs);

    let mut counter = 0;
    let mut matrices = Vec::with_capacity(apart.len());
    let mut total = 0usize;
    for f in &apart {
        let (sk, next) = skolemize(f, counter);
        counter = next;
        let matrix = drop_universals(&sk);
        total = total.saturating_add(clause_count(&matrix));
        if total > limit {
            return Err(ClausalError::ClauseExplosion {
                clauses: total,
                limit,
            });
        }
        matrices.push(matrix);
    }

    let mut set = ClauseSet {
        clauses: Vec::new(),
        skolem_counter: counter,
    };
    for (source, matrix) in matrices.iter().enumerate() {
        for lits in distribute(matrix) {
            if !is_tautology(&lits) {
                set.push(lits, Provenance::Input { source });
            }
        }
    }
    Ok(set)
}
