//! Clausal normal form.
//!
//! `clausify` runs the whole pipeline: connective elimination, negation
//! normal form, standardizing bound variables apart, Skolemization, dropping
//! universals, and distributing `∨` over `∧`. Each output clause renames its
//! variables with a `_<clause id>` suffix, so no two clauses share a
//! variable name.

mod transform;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::fol::{Atom, Term, ValidationError};

pub use transform::{
    clausify, clausify_with_limit, eliminate_connectives, skolemize, standardize_apart, to_nnf,
    DEFAULT_CLAUSE_LIMIT,
};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub positive: bool,
    pub atom: Atom,
}

impl Literal {
    pub fn new(positive: bool, predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Literal {
            positive,
            atom: Atom::new(predicate, args),
        }
    }

    pub fn pos(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Self::new(true, predicate, args)
    }

    pub fn neg(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Self::new(false, predicate, args)
    }

    pub fn predicate(&self) -> &str {
        &self.atom.predicate
    }

    pub fn args(&self) -> &[Term] {
        &self.atom.args
    }

    pub fn negated(&self) -> Literal {
        Literal {
            positive: !self.positive,
            atom: self.atom.clone(),
        }
    }

    pub fn is_complement_of(&self, other: &Literal) -> bool {
        self.positive != other.positive && self.atom == other.atom
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<String>) {
        self.atom.args.iter().for_each(|t| t.collect_vars(out));
    }

    pub fn weight(&self) -> usize {
        1 + self.atom.args.iter().map(Term::size).sum::<usize>()
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            f.write_str("¬")?;
        }
        write!(f, "{}", self.atom)
    }
}

/// How a clause came to exist. Parent references are clause ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Provenance {
    /// Produced by clausifying input formula number `source`.
    Input { source: usize },
    /// Binary resolution on `left.literals[left_literal]` and
    /// `right.literals[right_literal]`.
    Resolvent {
        left: usize,
        left_literal: usize,
        right: usize,
        right_literal: usize,
    },
    /// Factoring merging two literals of `parent`.
    Factor {
        parent: usize,
        first: usize,
        second: usize,
    },
}

impl Provenance {
    pub fn parents(&self) -> Vec<usize> {
        match *self {
            Provenance::Input { .. } => vec![],
            Provenance::Resolvent { left, right, .. } => vec![left, right],
            Provenance::Factor { parent, .. } => vec![parent],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    pub id: usize,
    /// Duplicate-free; an empty list denotes contradiction.
    pub literals: Vec<Literal>,
    pub provenance: Provenance,
}

impl Clause {
    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        self.literals.len() == 1
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.literals.iter().for_each(|l| l.collect_vars(&mut out));
        out
    }

    pub fn is_tautology(&self) -> bool {
        self.literals
            .iter()
            .enumerate()
            .any(|(i, a)| self.literals[i + 1..].iter().any(|b| a.is_complement_of(b)))
    }

    pub fn weight(&self) -> usize {
        self.literals.iter().map(Literal::weight).sum()
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.literals.is_empty() {
            return f.write_str("⊥");
        }
        for (i, l) in self.literals.iter().enumerate() {
            if i > 0 {
                f.write_str(" ∨ ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClauseSet {
    pub clauses: Vec<Clause>,
    /// Next unused Skolem index.
    pub skolem_counter: usize,
}

impl ClauseSet {
    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    /// Builds a clause set from literal lists, renaming variables apart.
    /// Handy for tests and for feeding hand-written problems to the prover.
    pub fn from_literals(clauses: Vec<Vec<Literal>>) -> Self {
        let mut set = ClauseSet::default();
        for (i, lits) in clauses.into_iter().enumerate() {
            set.push(lits, Provenance::Input { source: i });
        }
        set
    }

    /// Appends a clause with the next id, deduplicating literals and
    /// suffixing its variables with `_<id>`.
    pub(crate) fn push(&mut self, literals: Vec<Literal>, provenance: Provenance) {
        let id = self.clauses.len();
        let mut out: Vec<Literal> = Vec::with_capacity(literals.len());
        for lit in literals {
            let lit = transform::suffix_literal_vars(&lit, id);
            if !out.contains(&lit) {
                out.push(lit);
            }
        }
        self.clauses.push(Clause {
            id,
            literals: out,
            provenance,
        });
    }
}

impl fmt::Display for ClauseSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.clauses {
            writeln!(f, "{:>4}: {}", c.id, c)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ClausalError {
    #[error("clause explosion: {clauses} clauses exceed the limit of {limit}")]
    ClauseExplosion { clauses: usize, limit: usize },
    #[error("input formula {index} is not a well-formed sentence: {error}")]
    Invalid { index: usize, error: ValidationError },
}
