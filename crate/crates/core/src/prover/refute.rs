//! Given-clause saturation with binary resolution and factoring.
//!
//! Clause selection alternates four picks by (literal count, weight) with
//! one pick by age, which gives unit preference while staying fair.
//! Redundancy control is tautology deletion plus forward and backward
//! subsumption. Every derived clause records its parents and the literal
//! indices used, so a derivation can be replayed independently.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap, VecDeque};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::unify::{match_literal, unify_atoms, unify_atoms_with, Substitution};
use crate::clausal::{Clause, ClauseSet, Literal, Provenance};
use crate::fol::Term;

/// Resource limits for one refutation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub max_clauses: usize,
    pub max_iterations: usize,
    #[serde(with = "duration_ms")]
    pub wall_timeout: Duration,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_clauses: 50_000,
            max_iterations: 100_000,
            wall_timeout: Duration::from_millis(60_000),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("budget fields must be strictly positive")]
pub struct BudgetError;

impl Budget {
    pub fn new(max_clauses: usize, max_iterations: usize, wall_timeout: Duration) -> Result<Self, BudgetError> {
        if max_clauses == 0 || max_iterations == 0 || wall_timeout.is_zero() {
            return Err(BudgetError);
        }
        Ok(Budget {
            max_clauses,
            max_iterations,
            wall_timeout,
        })
    }

    pub fn with_timeout_ms(self, ms: u64) -> Result<Self, BudgetError> {
        Budget::new(self.max_clauses, self.max_iterations, Duration::from_millis(ms))
    }
}

mod duration_ms {
    use serde::{Deserialize, Deserializer, Serializer};
    use std::time::Duration;

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(d.as_millis() as u64)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        Ok(Duration::from_millis(u64::deserialize(d)?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Limit {
    MaxClauses,
    MaxIterations,
    WallTimeout,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Outcome {
    /// The empty clause was derived. `proof` lists every clause in its
    /// derivation in id order; the last one is empty.
    Unsat { proof: Vec<ProofStep> },
    /// No non-redundant inference is left.
    Saturated,
    ResourceOut { limit: Limit },
}

/// One clause of a recorded derivation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofStep {
    pub id: usize,
    pub clause: String,
    pub provenance: Provenance,
    #[serde(skip)]
    pub literals: Vec<Literal>,
}

impl ProofStep {
    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverStats {
    /// Inferences produced, including discarded ones.
    pub generated: usize,
    /// Clauses stored (inputs plus retained inferences).
    pub kept: usize,
    pub iterations: usize,
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverVerdict {
    #[serde(flatten)]
    pub outcome: Outcome,
    pub stats: SolverStats,
}

impl SolverVerdict {
    pub fn is_unsat(&self) -> bool {
        matches!(self.outcome, Outcome::Unsat { .. })
    }

    pub fn is_saturated(&self) -> bool {
        matches!(self.outcome, Outcome::Saturated)
    }

    pub fn is_resource_out(&self) -> bool {
        matches!(self.outcome, Outcome::ResourceOut { .. })
    }

    pub fn proof(&self) -> Option<&[ProofStep]> {
        match &self.outcome {
            Outcome::Unsat { proof } => Some(proof),
            _ => None,
        }
    }
}

/// Runs the saturation loop on `cs` within `budget`.
pub fn refute(cs: &ClauseSet, budget: &Budget) -> SolverVerdict {
    let mut engine = Engine::new(*budget);
    let outcome = engine.run(cs);
    let stats = SolverStats {
        generated: engine.generated,
        kept: engine.store.len(),
        iterations: engine.iterations,
        elapsed_ms: engine.started.elapsed().as_millis() as u64,
    };
    SolverVerdict { outcome, stats }
}

/// Sign and predicate; a literal can only match into a literal with the
/// same key.
type Key = (bool, String);

fn key(l: &Literal) -> Key {
    (l.positive, l.atom.predicate.clone())
}

const AGE_EVERY: usize = 5;

struct Engine {
    budget: Budget,
    started: Instant,
    store: Vec<Clause>,
    alive: Vec<bool>,
    by_weight: BinaryHeap<Reverse<(usize, usize, usize)>>,
    by_age: VecDeque<usize>,
    /// Clauses that have been given, i.e. are available as partners.
    active: Vec<usize>,
    /// first-literal key -> candidate subsumers
    first_key: HashMap<Key, Vec<usize>>,
    /// any-literal key -> candidate subsumees
    any_key: HashMap<Key, Vec<usize>>,
    generated: usize,
    iterations: usize,
    picks: usize,
}

enum Admit {
    Kept,
    Discarded,
    Empty(usize),
    Full,
}

impl Engine {
    fn new(budget: Budget) -> Self {
        Engine {
            budget,
            started: Instant::now(),
            store: Vec::new(),
            alive: Vec::new(),
            by_weight: BinaryHeap::new(),
            by_age: VecDeque::new(),
            active: Vec::new(),
            first_key: HashMap::new(),
            any_key: HashMap::new(),
            generated: 0,
            iterations: 0,
            picks: 0,
        }
    }

    fn out_of_time(&self) -> bool {
        self.started.elapsed() >= self.budget.wall_timeout
    }

    fn run(&mut self, cs: &ClauseSet) -> Outcome {
        // Inputs are stored verbatim so their ids match the clause set.
        for c in &cs.clauses {
            let id = self.store.len();
            let clause = Clause {
                id,
                literals: dedup(c.literals.clone()),
                provenance: c.provenance.clone(),
            };
            let empty = clause.is_empty();
            self.store.push(clause);
            self.alive.push(false);
            if empty {
                return self.unsat(id);
            }
            if self.store[id].is_tautology() || self.forward_subsumed(&self.store[id].literals) {
                continue;
            }
            self.keep(id);
        }
        if self.store.len() > self.budget.max_clauses {
            return Outcome::ResourceOut {
                limit: Limit::MaxClauses,
            };
        }

        loop {
            if self.iterations >= self.budget.max_iterations {
                return Outcome::ResourceOut {
                    limit: Limit::MaxIterations,
                };
            }
            if self.out_of_time() {
                return Outcome::ResourceOut {
                    limit: Limit::WallTimeout,
                };
            }
            let Some(given) = self.select() else {
                return Outcome::Saturated;
            };
            self.iterations += 1;
            self.active.push(given);

            let mut fresh: Vec<(Vec<Literal>, Provenance)> = factors(given, &self.store[given]);
            let partners = self.active.clone();
            for partner in partners {
                if !self.alive[partner] {
                    continue;
                }
                fresh.extend(resolvents(&self.store[given], &self.store[partner]));
            }
            for (i, (literals, provenance)) in fresh.into_iter().enumerate() {
                if i % 256 == 255 && self.out_of_time() {
                    return Outcome::ResourceOut {
                        limit: Limit::WallTimeout,
                    };
                }
                match self.admit(literals, provenance) {
                    Admit::Empty(id) => return self.unsat(id),
                    Admit::Full => {
                        return Outcome::ResourceOut {
                            limit: Limit::MaxClauses,
                        }
                    }
                    Admit::Kept | Admit::Discarded => {}
                }
                if !self.alive[given] {
                    // The given clause was subsumed by one of its own
                    // inferences; remaining inferences from it are redundant.
                    break;
                }
            }
        }
    }

    fn select(&mut self) -> Option<usize> {
        loop {
            self.picks += 1;
            let by_age = self.picks.is_multiple_of(AGE_EVERY);
            let next = if by_age {
                self.by_age.pop_front()
            } else {
                self.by_weight.pop().map(|Reverse((_, _, id))| id)
            };
            let id = match next {
                Some(id) => id,
                None => {
                    // One queue is empty; fall back to the other.
                    let other = if by_age {
                        self.by_weight.pop().map(|Reverse((_, _, id))| id)
                    } else {
                        self.by_age.pop_front()
                    };
                    other?
                }
            };
            if self.alive[id] && !self.active.contains(&id) {
                return Some(id);
            }
        }
    }

    fn admit(&mut self, literals: Vec<Literal>, provenance: Provenance) -> Admit {
        self.generated += 1;
        let literals = dedup(literals);
        if is_tautology(&literals) {
            return Admit::Discarded;
        }
        if !literals.is_empty() && self.forward_subsumed(&literals) {
            return Admit::Discarded;
        }
        let id = self.store.len();
        let literals = rename_for(&literals, id);
        let empty = literals.is_empty();
        self.store.push(Clause {
            id,
            literals,
            provenance,
        });
        self.alive.push(false);
        if empty {
            return Admit::Empty(id);
        }
        self.backward_subsume(id);
        self.keep(id);
        if self.store.len() > self.budget.max_clauses {
            return Admit::Full;
        }
        Admit::Kept
    }

    fn keep(&mut self, id: usize) {
        let c = &self.store[id];
        self.alive[id] = true;
        self.by_weight.push(Reverse((c.literals.len(), c.weight(), id)));
        self.by_age.push_back(id);
        self.first_key.entry(key(&c.literals[0])).or_default().push(id);
        let mut keys: Vec<Key> = c.literals.iter().map(key).collect();
        keys.sort();
        keys.dedup();
        for k in keys {
            self.any_key.entry(k).or_default().push(id);
        }
    }

    fn forward_subsumed(&self, literals: &[Literal]) -> bool {
        let mut keys: Vec<Key> = literals.iter().map(key).collect();
        keys.sort();
        keys.dedup();
        keys.iter().any(|k| {
            self.first_key.get(k).is_some_and(|ids| {
                ids.iter()
                    .any(|&d| self.alive[d] && subsumes(&self.store[d].literals, literals))
            })
        })
    }

    fn backward_subsume(&mut self, id: usize) {
        let k = key(&self.store[id].literals[0]);
        let Some(candidates) = self.any_key.get(&k) else {
            return;
        };
        let victims: Vec<usize> = candidates
            .iter()
            .copied()
            .filter(|&d| {
                d != id && self.alive[d] && subsumes(&self.store[id].literals, &self.store[d].literals)
            })
            .collect();
        for d in victims {
            self.alive[d] = false;
        }
    }

    fn unsat(&self, empty: usize) -> Outcome {
        let mut needed = vec![false; self.store.len()];
        let mut stack = vec![empty];
        while let Some(id) = stack.pop() {
            if needed[id] {
                continue;
            }
            needed[id] = true;
            stack.extend(self.store[id].provenance.parents());
        }
        let proof = self
            .store
            .iter()
            .filter(|c| needed[c.id])
            .map(|c| ProofStep {
                id: c.id,
                clause: c.to_string(),
                provenance: c.provenance.clone(),
                literals: c.literals.clone(),
            })
            .collect();
        Outcome::Unsat { proof }
    }
}

fn dedup(literals: Vec<Literal>) -> Vec<Literal> {
    let mut out: Vec<Literal> = Vec::with_capacity(literals.len());
    for l in literals {
        if !out.contains(&l) {
            out.push(l);
        }
    }
    out
}

fn is_tautology(literals: &[Literal]) -> bool {
    literals
        .iter()
        .enumerate()
        .any(|(i, a)| literals[i + 1..].iter().any(|b| a.is_complement_of(b)))
}

/// Renames variables to `v<n>_<id>` in order of first occurrence, keeping
/// clause-local names globally unique.
fn rename_for(literals: &[Literal], id: usize) -> Vec<Literal> {
    let mut names: BTreeMap<String, Term> = BTreeMap::new();
    let mut order = 0usize;
    fn go(t: &Term, id: usize, names: &mut BTreeMap<String, Term>, order: &mut usize) -> Term {
        match t {
            Term::Var(v) => names
                .entry(v.clone())
                .or_insert_with(|| {
                    let n = Term::Var(format!("v{}_{}", *order, id));
                    *order += 1;
                    n
                })
                .clone(),
            Term::Const(_) => t.clone(),
            Term::App(f, args) => {
                Term::App(f.clone(), args.iter().map(|a| go(a, id, names, order)).collect())
            }
        }
    }
    literals
        .iter()
        .map(|l| Literal {
            positive: l.positive,
            atom: crate::fol::Atom::new(
                l.atom.predicate.clone(),
                l.atom.args.iter().map(|t| go(t, id, &mut names, &mut order)).collect(),
            ),
        })
        .collect()
}

/// Copy of a clause with every variable primed, used to resolve a clause
/// against itself.
pub(crate) fn primed(literals: &[Literal]) -> Vec<Literal> {
    fn go(t: &Term) -> Term {
        match t {
            Term::Var(v) => Term::Var(format!("{v}'")),
            Term::Const(_) => t.clone(),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(go).collect()),
        }
    }
    literals
        .iter()
        .map(|l| Literal {
            positive: l.positive,
            atom: crate::fol::Atom::new(l.atom.predicate.clone(), l.atom.args.iter().map(go).collect()),
        })
        .collect()
}

/// Binary resolvent of `left[i]` and `right[j]`, if they are complementary
/// and unify. The caller makes sure the clauses share no variables.
pub(crate) fn resolve_on(left: &[Literal], i: usize, right: &[Literal], j: usize) -> Option<Vec<Literal>> {
    let (a, b) = (&left[i], &right[j]);
    if a.positive == b.positive {
        return None;
    }
    let sigma = unify_atoms(&a.atom, &b.atom)?;
    let mut out: Vec<Literal> = Vec::with_capacity(left.len() + right.len() - 2);
    for (k, l) in left.iter().enumerate() {
        if k != i {
            out.push(sigma.apply_literal(l));
        }
    }
    for (k, l) in right.iter().enumerate() {
        if k != j {
            out.push(sigma.apply_literal(l));
        }
    }
    Some(dedup(out))
}

/// Factor merging literals `i` and `j` of `lits` (same sign).
pub(crate) fn factor_on(lits: &[Literal], i: usize, j: usize) -> Option<Vec<Literal>> {
    let (a, b) = (&lits[i], &lits[j]);
    if a.positive != b.positive {
        return None;
    }
    let sigma: Substitution = unify_atoms_with(&a.atom, &b.atom, Substitution::new())?;
    let out = lits
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != j)
        .map(|(_, l)| sigma.apply_literal(l))
        .collect();
    Some(dedup(out))
}

fn resolvents(given: &Clause, partner: &Clause) -> Vec<(Vec<Literal>, Provenance)> {
    let same = given.id == partner.id;
    let right = if same {
        primed(&partner.literals)
    } else {
        partner.literals.clone()
    };
    let mut out = Vec::new();
    for i in 0..given.literals.len() {
        for j in 0..right.len() {
            if given.literals[i].positive == right[j].positive
                || given.literals[i].atom.predicate != right[j].atom.predicate
            {
                continue;
            }
            if let Some(r) = resolve_on(&given.literals, i, &right, j) {
                out.push((
                    r,
                    Provenance::Resolvent {
                        left: given.id,
                        left_literal: i,
                        right: partner.id,
                        right_literal: j,
                    },
                ));
            }
        }
    }
    out
}

fn factors(id: usize, c: &Clause) -> Vec<(Vec<Literal>, Provenance)> {
    let mut out = Vec::new();
    let lits = &c.literals;
    for i in 0..lits.len() {
        for j in i + 1..lits.len() {
            if lits[i].atom.predicate != lits[j].atom.predicate {
                continue;
            }
            if let Some(f) = factor_on(lits, i, j) {
                out.push((
                    f,
                    Provenance::Factor {
                        parent: id,
                        first: i,
                        second: j,
                    },
                ));
            }
        }
    }
    out
}

/// θ-subsumption: some substitution maps every literal of `general` onto a
/// literal of `specific`.
pub fn subsumes(general: &[Literal], specific: &[Literal]) -> bool {
    if general.len() > specific.len() {
        return false;
    }
    fn search(general: &[Literal], specific: &[Literal], bindings: &mut BTreeMap<String, Term>) -> bool {
        let Some((first, rest)) = general.split_first() else {
            return true;
        };
        for target in specific {
            let snapshot = bindings.clone();
            if match_literal(first, target, bindings) && search(rest, specific, bindings) {
                return true;
            }
            *bindings = snapshot;
        }
        false
    }
    search(general, specific, &mut BTreeMap::new())
}

/// Same clause up to variable renaming and literal order.
pub fn is_variant(a: &[Literal], b: &[Literal]) -> bool {
    a.len() == b.len() && subsumes(a, b) && subsumes(b, a)
}
