use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// A first-order term.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(String),
    /// Function application; always has at least one argument.
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn constant(name: impl Into<String>) -> Self {
        Term::Const(name.into())
    }

    pub fn app(name: impl Into<String>, args: Vec<Term>) -> Self {
        Term::App(name.into(), args)
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    /// Returns true when `var` occurs anywhere inside this term.
    pub fn contains_var(&self, var: &str) -> bool {
        match self {
            Term::Var(v) => v == var,
            Term::Const(_) => false,
            Term::App(_, args) => args.iter().any(|a| a.contains_var(var)),
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Const(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    /// Number of symbol occurrences; used as a clause weight.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Const(_) => true,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }
}

/// A predicate applied to terms. Nullary predicates have no arguments.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Atom {
            predicate: predicate.into(),
            args,
        }
    }
}

/// First-order formula. `And`/`Or` are n-ary and kept flat by the
/// constructors and the parser.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(Atom),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Xor(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
}

impl Formula {
    pub fn atom(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Formula::Atom(Atom::new(predicate, args))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    /// Flattening conjunction. A single operand is returned unchanged.
    pub fn and(parts: Vec<Formula>) -> Self {
        Self::junction(parts, true)
    }

    /// Flattening disjunction. A single operand is returned unchanged.
    pub fn or(parts: Vec<Formula>) -> Self {
        Self::junction(parts, false)
    }

    fn junction(parts: Vec<Formula>, conj: bool) -> Self {
        let mut flat = Vec::with_capacity(parts.len());
        for p in parts {
            match (p, conj) {
                (Formula::And(inner), true) | (Formula::Or(inner), false) => flat.extend(inner),
                (other, _) => flat.push(other),
            }
        }
        assert!(!flat.is_empty(), "empty junction");
        if flat.len() == 1 {
            return flat.pop().unwrap();
        }
        if conj {
            Formula::And(flat)
        } else {
            Formula::Or(flat)
        }
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn xor(a: Formula, b: Formula) -> Self {
        Formula::Xor(Box::new(a), Box::new(b))
    }

    pub fn forall(var: impl Into<String>, body: Formula) -> Self {
        Formula::Forall(var.into(), Box::new(body))
    }

    pub fn exists(var: impl Into<String>, body: Formula) -> Self {
        Formula::Exists(var.into(), Box::new(body))
    }

    /// Rebuilds the formula with every nested `And`/`Or` spliced into its
    /// parent of the same kind.
    pub fn flattened(&self) -> Formula {
        match self {
            Formula::Atom(_) => self.clone(),
            Formula::Not(f) => Formula::not(f.flattened()),
            Formula::And(fs) => Formula::and(fs.iter().map(Formula::flattened).collect()),
            Formula::Or(fs) => Formula::or(fs.iter().map(Formula::flattened).collect()),
            Formula::Implies(a, b) => Formula::implies(a.flattened(), b.flattened()),
            Formula::Iff(a, b) => Formula::iff(a.flattened(), b.flattened()),
            Formula::Xor(a, b) => Formula::xor(a.flattened(), b.flattened()),
            Formula::Forall(v, f) => Formula::forall(v.clone(), f.flattened()),
            Formula::Exists(v, f) => Formula::exists(v.clone(), f.flattened()),
        }
    }

    /// Free variables: `Term::Var` occurrences not bound by an enclosing
    /// quantifier.
    pub fn free_variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut bound = Vec::new();
        self.free_vars_into(&mut bound, &mut out);
        out
    }

    fn free_vars_into(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom(a) => {
                let mut vs = BTreeSet::new();
                a.args.iter().for_each(|t| t.collect_vars(&mut vs));
                out.extend(vs.into_iter().filter(|v| !bound.contains(v)));
            }
            Formula::Not(f) => f.free_vars_into(bound, out),
            Formula::And(fs) | Formula::Or(fs) => {
                fs.iter().for_each(|f| f.free_vars_into(bound, out))
            }
            Formula::Implies(a, b) | Formula::Iff(a, b) | Formula::Xor(a, b) => {
                a.free_vars_into(bound, out);
                b.free_vars_into(bound, out);
            }
            Formula::Forall(v, f) | Formula::Exists(v, f) => {
                bound.push(v.clone());
                f.free_vars_into(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_variables().is_empty()
    }

    /// Visits every atom in the formula, left to right.
    pub fn for_each_atom<'a>(&'a self, visit: &mut impl FnMut(&'a Atom)) {
        match self {
            Formula::Atom(a) => visit(a),
            Formula::Not(f) | Formula::Forall(_, f) | Formula::Exists(_, f) => {
                f.for_each_atom(visit)
            }
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.for_each_atom(visit)),
            Formula::Implies(a, b) | Formula::Iff(a, b) | Formula::Xor(a, b) => {
                a.for_each_atom(visit);
                b.for_each_atom(visit);
            }
        }
    }

    /// Nesting depth, counting an atom as depth 1.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Atom(_) => 1,
            Formula::Not(f) | Formula::Forall(_, f) | Formula::Exists(_, f) => 1 + f.depth(),
            Formula::And(fs) | Formula::Or(fs) => 1 + fs.iter().map(Formula::depth).max().unwrap_or(0),
            Formula::Implies(a, b) | Formula::Iff(a, b) | Formula::Xor(a, b) => {
                1 + a.depth().max(b.depth())
            }
        }
    }
}

/// Three-way benchmark label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    True,
    False,
    Uncertain,
}

impl Label {
    pub const ALL: [Label; 3] = [Label::True, Label::False, Label::Uncertain];

    pub fn as_str(self) -> &'static str {
        match self {
            Label::True => "True",
            Label::False => "False",
            Label::Uncertain => "Uncertain",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("not a label: {0:?} (expected True, False or Uncertain)")]
pub struct LabelParseError(pub String);

impl FromStr for Label {
    type Err = LabelParseError;

    /// Case-insensitive match against the three label names.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        Label::ALL
            .into_iter()
            .find(|l| l.as_str().eq_ignore_ascii_case(t))
            .ok_or_else(|| LabelParseError(s.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_variables_examples() {
        let f = Formula::forall("x", Formula::atom("P", vec![Term::var("x"), Term::var("y")]));
        assert_eq!(f.free_variables(), BTreeSet::from(["y".to_string()]));

        let g = Formula::forall(
            "x",
            Formula::exists("y", Formula::atom("R", vec![Term::var("x"), Term::var("y")])),
        );
        assert!(g.free_variables().is_empty());

        assert!(Formula::atom("P", vec![Term::constant("a")]).free_variables().is_empty());
    }

    #[test]
    fn junctions_flatten_in_order() {
        let p = |n: &str| Formula::atom(n, vec![]);
        let f = Formula::and(vec![Formula::and(vec![p("A"), p("B")]), p("C")]);
        assert_eq!(f, Formula::And(vec![p("A"), p("B"), p("C")]));
        assert_eq!(Formula::or(vec![p("A")]), p("A"));
    }

    #[test]
    fn label_parsing_and_display() {
        assert_eq!("uncertain".parse::<Label>().unwrap(), Label::Uncertain);
        assert_eq!(" TRUE ".parse::<Label>().unwrap(), Label::True);
        assert!("Unknown".parse::<Label>().is_err());
        assert_eq!(Label::False.to_string(), "False");
        assert_eq!(serde_json::to_string(&Label::Uncertain).unwrap(), "\"Uncertain\"");
    }
}
