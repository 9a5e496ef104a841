//! First-order syntax: terms, formulas, labels, the surface-syntax parser
//! and canonical printer, and well-formedness checks.

mod ast;
pub mod lexer;
mod parser;
mod render;
mod signature;

use std::collections::BTreeSet;
use std::fmt;

pub use ast::{Atom, Formula, Label, LabelParseError, Term};
pub use parser::{check_balance, parse_formula};
pub use render::render;
pub use signature::{infer_signature, Signature, SignatureError, SymbolRole};

/// Name prefix reserved for Skolem symbols.
pub const SKOLEM_PREFIX: &str = "_sk";

/// Parenthesis imbalance found before parsing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Imbalance {
    /// `(` without a matching `)`; byte offsets of every unclosed `(`.
    Unclosed { open_positions: Vec<usize> },
    /// A `)` with nothing to close, at this byte offset.
    UnmatchedClose { position: usize },
}

impl Imbalance {
    /// Number of single-character edits needed to balance the text.
    pub fn magnitude(&self) -> usize {
        match self {
            Imbalance::Unclosed { open_positions } => open_positions.len(),
            Imbalance::UnmatchedClose { .. } => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntaxError {
    /// Byte offset into the source text.
    pub position: usize,
    pub expected: String,
    pub found: String,
    pub imbalance: Option<Imbalance>,
}

impl SyntaxError {
    pub(crate) fn new(position: usize, expected: impl Into<String>, found: impl Into<String>) -> Self {
        SyntaxError {
            position,
            expected: expected.into(),
            found: found.into(),
            imbalance: None,
        }
    }
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.imbalance {
            Some(Imbalance::Unclosed { open_positions }) => write!(
                f,
                "syntax error at byte {}: {} unclosed `(` (opened at byte {})",
                self.position,
                open_positions.len(),
                open_positions
                    .iter()
                    .map(|p| p.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
            Some(Imbalance::UnmatchedClose { position }) => {
                write!(f, "syntax error at byte {position}: unmatched `)`")
            }
            None => write!(
                f,
                "syntax error at byte {}: expected {}, found {}",
                self.position, self.expected, self.found
            ),
        }
    }
}

impl std::error::Error for SyntaxError {}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ValidationError {
    #[error("illegal identifier `{0}`")]
    InvalidIdentifier(String),
    #[error("identifier `{0}` uses the reserved prefix `_sk`")]
    ReservedPrefix(String),
    #[error("formula has free variables: {}", .0.iter().cloned().collect::<Vec<_>>().join(", "))]
    FreeVariables(BTreeSet<String>),
    #[error(transparent)]
    Signature(#[from] SignatureError),
}

/// `[A-Za-z_][A-Za-z0-9_-]*`
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

fn check_name(name: &str) -> Result<(), ValidationError> {
    if !is_identifier(name) {
        return Err(ValidationError::InvalidIdentifier(name.to_string()));
    }
    if name.starts_with(SKOLEM_PREFIX) {
        return Err(ValidationError::ReservedPrefix(name.to_string()));
    }
    Ok(())
}

fn check_term_names(t: &Term) -> Result<(), ValidationError> {
    match t {
        Term::Var(n) | Term::Const(n) => check_name(n),
        Term::App(n, args) => {
            check_name(n)?;
            args.iter().try_for_each(check_term_names)
        }
    }
}

fn check_names(f: &Formula) -> Result<(), ValidationError> {
    match f {
        Formula::Atom(a) => {
            check_name(&a.predicate)?;
            a.args.iter().try_for_each(check_term_names)
        }
        Formula::Not(g) => check_names(g),
        Formula::And(gs) | Formula::Or(gs) => gs.iter().try_for_each(check_names),
        Formula::Implies(a, b) | Formula::Iff(a, b) | Formula::Xor(a, b) => {
            check_names(a)?;
            check_names(b)
        }
        Formula::Forall(v, g) | Formula::Exists(v, g) => {
            check_name(v)?;
            check_names(g)
        }
    }
}

/// Checks that a formula is a well-formed sentence: legal identifiers, no
/// reserved names, consistent arities, and no free variables.
pub fn validate(f: &Formula) -> Result<(), ValidationError> {
    check_names(f)?;
    infer_signature(std::slice::from_ref(f))?;
    let free = f.free_variables();
    if !free.is_empty() {
        return Err(ValidationError::FreeVariables(free));
    }
    Ok(())
}

/// Conventional variable spelling: one of `u`..`z`, optionally followed by
/// digits.
fn looks_like_variable(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some('u'..='z')) && chars.all(|c| c.is_ascii_digit())
}

/// Universally closes a formula. Free `Var`s are bound, and so are
/// unbound constants spelled like variables (`x`, `y2`, ...), which is how
/// an open annotation reads after parsing. Used only when ingestion opts in.
pub fn universal_closure(f: &Formula) -> Formula {
    fn rebind_term(t: &Term, bound: &[String], hits: &mut BTreeSet<String>) -> Term {
        match t {
            Term::Const(c) if looks_like_variable(c) && !bound.contains(c) => {
                hits.insert(c.clone());
                Term::Var(c.clone())
            }
            Term::Var(v) => {
                if !bound.contains(v) {
                    hits.insert(v.clone());
                }
                t.clone()
            }
            Term::App(n, args) => {
                Term::App(n.clone(), args.iter().map(|a| rebind_term(a, bound, hits)).collect())
            }
            Term::Const(_) => t.clone(),
        }
    }
    fn go(f: &Formula, bound: &mut Vec<String>, hits: &mut BTreeSet<String>) -> Formula {
        match f {
            Formula::Atom(a) => Formula::Atom(Atom::new(
                a.predicate.clone(),
                a.args.iter().map(|t| rebind_term(t, bound, hits)).collect(),
            )),
            Formula::Not(g) => Formula::not(go(g, bound, hits)),
            Formula::And(gs) => Formula::And(gs.iter().map(|g| go(g, bound, hits)).collect()),
            Formula::Or(gs) => Formula::Or(gs.iter().map(|g| go(g, bound, hits)).collect()),
            Formula::Implies(a, b) => Formula::implies(go(a, bound, hits), go(b, bound, hits)),
            Formula::Iff(a, b) => Formula::iff(go(a, bound, hits), go(b, bound, hits)),
            Formula::Xor(a, b) => Formula::xor(go(a, bound, hits), go(b, bound, hits)),
            Formula::Forall(v, g) | Formula::Exists(v, g) => {
                bound.push(v.clone());
                let body = go(g, bound, hits);
                bound.pop();
                if matches!(f, Formula::Forall(..)) {
                    Formula::forall(v.clone(), body)
                } else {
                    Formula::exists(v.clone(), body)
                }
            }
        }
    }
    let mut hits = BTreeSet::new();
    let mut body = go(f, &mut Vec::new(), &mut hits);
    for v in hits.into_iter().rev() {
        body = Formula::forall(v, body);
    }
    body
}
