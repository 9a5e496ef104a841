//! Syntactic unification with occurs check, plus one-way matching for
//! subsumption.

use std::collections::BTreeMap;
use std::fmt;

use crate::clausal::Literal;
use crate::fol::{Atom, Term};

/// Variable bindings. Kept idempotent: no bound variable occurs in any
/// binding's right-hand side.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Substitution {
    map: BTreeMap<String, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn get(&self, var: &str) -> Option<&Term> {
        self.map.get(var)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Term)> {
        self.map.iter()
    }

    pub fn apply(&self, t: &Term) -> Term {
        if self.map.is_empty() {
            return t.clone();
        }
        match t {
            Term::Var(v) => self.map.get(v).cloned().unwrap_or_else(|| t.clone()),
            Term::Const(_) => t.clone(),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| self.apply(a)).collect()),
        }
    }

    pub fn apply_atom(&self, a: &Atom) -> Atom {
        Atom::new(a.predicate.clone(), a.args.iter().map(|t| self.apply(t)).collect())
    }

    pub fn apply_literal(&self, l: &Literal) -> Literal {
        Literal {
            positive: l.positive,
            atom: self.apply_atom(&l.atom),
        }
    }

    /// Adds `var ↦ t` (with `t` already normalized under `self`) and
    /// rewrites existing bindings to stay idempotent.
    fn bind(&mut self, var: String, t: Term) {
        let single = Substitution {
            map: BTreeMap::from([(var.clone(), t.clone())]),
        };
        for v in self.map.values_mut() {
            *v = single.apply(v);
        }
        self.map.insert(var, t);
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, t)) in self.map.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v} ↦ {t}")?;
        }
        f.write_str("}")
    }
}

fn unify_into(pairs: &mut Vec<(Term, Term)>, subst: &mut Substitution) -> bool {
    while let Some((a, b)) = pairs.pop() {
        let a = subst.apply(&a);
        let b = subst.apply(&b);
        if a == b {
            continue;
        }
        match (a, b) {
            (Term::Var(v), t) | (t, Term::Var(v)) => {
                if t.contains_var(&v) {
                    return false;
                }
                subst.bind(v, t);
            }
            (Term::App(f, fa), Term::App(g, ga)) => {
                if f != g || fa.len() != ga.len() {
                    return false;
                }
                pairs.extend(fa.into_iter().zip(ga));
            }
            _ => return false,
        }
    }
    true
}

/// Most general unifier of two terms, or `None`.
pub fn unify(a: &Term, b: &Term) -> Option<Substitution> {
    let mut subst = Substitution::new();
    unify_into(&mut vec![(a.clone(), b.clone())], &mut subst).then_some(subst)
}

/// Most general unifier of two atoms (same predicate and arity required).
pub fn unify_atoms(a: &Atom, b: &Atom) -> Option<Substitution> {
    unify_atoms_with(a, b, Substitution::new())
}

/// Extends an existing unifier so that it also unifies `a` and `b`.
pub fn unify_atoms_with(a: &Atom, b: &Atom, mut subst: Substitution) -> Option<Substitution> {
    if a.predicate != b.predicate || a.args.len() != b.args.len() {
        return None;
    }
    let mut pairs: Vec<(Term, Term)> = a.args.iter().cloned().zip(b.args.iter().cloned()).collect();
    unify_into(&mut pairs, &mut subst).then_some(subst)
}

/// One-way matching: extends `bindings` so that `pattern` instantiated by it
/// equals `target`. Variables of `target` are treated as constants.
pub(crate) fn match_term(pattern: &Term, target: &Term, bindings: &mut BTreeMap<String, Term>) -> bool {
    match pattern {
        Term::Var(v) => match bindings.get(v) {
            Some(bound) => bound == target,
            None => {
                bindings.insert(v.clone(), target.clone());
                true
            }
        },
        Term::Const(c) => matches!(target, Term::Const(d) if c == d),
        Term::App(f, args) => match target {
            Term::App(g, targs) if f == g && args.len() == targs.len() => args
                .iter()
                .zip(targs)
                .all(|(p, t)| match_term(p, t, bindings)),
            _ => false,
        },
    }
}

pub(crate) fn match_literal(
    pattern: &Literal,
    target: &Literal,
    bindings: &mut BTreeMap<String, Term>,
) -> bool {
    if pattern.positive != target.positive
        || pattern.atom.predicate != target.atom.predicate
        || pattern.atom.args.len() != target.atom.args.len()
    {
        return false;
    }
    let snapshot = bindings.clone();
    let ok = pattern
        .atom
        .args
        .iter()
        .zip(&target.atom.args)
        .all(|(p, t)| match_term(p, t, bindings));
    if !ok {
        *bindings = snapshot;
    }
    ok
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: &str) -> Term {
        Term::var(n)
    }
    fn c(n: &str) -> Term {
        Term::constant(n)
    }
    fn f(args: Vec<Term>) -> Term {
        Term::app("f", args)
    }

    #[test]
    fn textbook_mgu() {
        let s = unify(&f(vec![v("x"), c("b")]), &f(vec![c("a"), v("y")])).unwrap();
        assert_eq!(s.get("x"), Some(&c("a")));
        assert_eq!(s.get("y"), Some(&c("b")));
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn occurs_check() {
        assert!(unify(&v("x"), &f(vec![v("x")])).is_none());
        assert!(unify(&f(vec![v("x"), v("x")]), &f(vec![v("y"), f(vec![v("y")])])).is_none());
    }

    #[test]
    fn identical_atoms_need_nothing() {
        let a = Atom::new("P", vec![c("a")]);
        assert_eq!(unify_atoms(&a, &a), Some(Substitution::new()));
        assert!(unify_atoms(&a, &Atom::new("Q", vec![c("a")])).is_none());
        assert!(unify_atoms(&a, &Atom::new("P", vec![c("b")])).is_none());
    }

    #[test]
    fn result_is_idempotent_and_unifies() {
        let a = Term::app("g", vec![v("x"), f(vec![v("y")]), v("z")]);
        let b = Term::app("g", vec![v("y"), v("z"), f(vec![c("a")])]);
        let s = unify(&a, &b).unwrap();
        assert_eq!(s.apply(&a), s.apply(&b));
        for (_, t) in s.iter() {
            assert_eq!(s.apply(t), *t);
        }
    }

    #[test]
    fn matching_is_one_way() {
        let mut b = BTreeMap::new();
        assert!(match_term(&f(vec![v("x")]), &f(vec![c("a")]), &mut b));
        let mut b = BTreeMap::new();
        assert!(!match_term(&f(vec![c("a")]), &f(vec![v("x")]), &mut b));
        let mut b = BTreeMap::new();
        assert!(!match_term(&f(vec![v("x"), v("x")]), &f(vec![c("a"), c("b")]), &mut b));
    }
}
