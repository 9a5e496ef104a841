#![allow(dead_code)]

use entailbench::fol::{parse_formula, Formula, Label};

pub struct HandCase {
    pub name: &'static str,
    pub premises: &'static [&'static str],
    pub conclusion: &'static str,
    pub label: Label,
    /// Contains a function symbol, so the ground oracle cannot check it and
    /// the label rests on a hand proof.
    pub uses_functions: bool,
}

const fn case(
    name: &'static str,
    premises: &'static [&'static str],
    conclusion: &'static str,
    label: Label,
) -> HandCase {
    HandCase {
        name,
        premises,
        conclusion,
        label,
        uses_functions: false,
    }
}

const fn by_hand(
    name: &'static str,
    premises: &'static [&'static str],
    conclusion: &'static str,
    label: Label,
) -> HandCase {
    HandCase {
        name,
        premises,
        conclusion,
        label,
        uses_functions: true,
    }
}

use Label::{False as F, True as T, Uncertain as U};

/// Ten instances per label, with quantifier alternation, exclusive or and
/// biconditionals.
pub const HAND_SUITE: &[HandCase] = &[
    case("modus ponens", &["∀x (Man(x) → Mortal(x))", "Man(socrates)"], "Mortal(socrates)", T),
    case("chain", &["∀x (P(x) → Q(x))", "∀x (Q(x) → R(x))", "P(a)"], "R(a)", T),
    case("exists-forall to forall-exists", &["∃x ∀y Loves(x, y)"], "∀y ∃x Loves(x, y)", T),
    case("xor elimination", &["P(a) ⊕ Q(a)", "¬Q(a)"], "P(a)", T),
    case("iff elimination", &["P(a) ↔ Q(a)", "Q(a)"], "P(a)", T),
    case("universal disjunction", &["∀x (P(x) ∨ Q(x))", "¬P(b)"], "Q(b)", T),
    case("symmetry", &["∀x ∀y (R(x, y) → R(y, x))", "R(a, b)"], "R(b, a)", T),
    case("existential weakening", &["∃x (P(x) ∧ Q(x))"], "∃x P(x)", T),
    case("quantifier duality", &["¬∃x P(x)"], "∀x ¬P(x)", T),
    by_hand("witness through a function", &["∀x (P(x) → Q(f(x)))", "P(a)"], "∃y Q(y)", T),
    case("exclusion", &["∀x (P(x) → ¬Q(x))", "P(a)"], "Q(a)", F),
    case("xor both", &["P(a) ⊕ Q(a)", "P(a)"], "Q(a)", F),
    case("iff with negation", &["P(a) ↔ ¬Q(a)", "P(a)"], "Q(a)", F),
    case("universal against existential", &["∀x P(x)"], "∃x ¬P(x)", F),
    case("forall-exists against exists-forall-not", &["∀x ∃y R(x, y)"], "∃x ∀y ¬R(x, y)", F),
    case("de morgan", &["¬(P(a) ∨ Q(a))"], "Q(a)", F),
    case("chain negated", &["∀x (P(x) → Q(x))", "∀x (Q(x) → R(x))", "P(a)"], "¬R(a)", F),
    case("xor category", &["∀x (Cat(x) ⊕ Dog(x))", "Cat(tom)"], "Dog(tom)", F),
    case("some against none", &["∃x P(x)", "∀x (P(x) → Q(x))"], "∀x ¬Q(x)", F),
    by_hand("function image negated", &["∀x (P(x) → Q(f(x)))", "∀x (Q(x) → R(x))", "P(a)"], "¬R(f(a))", F),
    case("independent atoms", &["P(a)"], "Q(a)", U),
    case("affirming the consequent", &["∀x (P(x) → Q(x))", "Q(a)"], "P(a)", U),
    case("forall-exists to exists-forall", &["∀y ∃x Loves(x, y)"], "∃x ∀y Loves(x, y)", U),
    case("disjunct", &["P(a) ∨ Q(a)"], "P(a)", U),
    case("iff alone", &["P(a) ↔ Q(a)"], "P(a)", U),
    case("xor alone", &["P(a) ⊕ Q(a)"], "¬Q(a)", U),
    case("existential to named", &["∃x P(x)"], "P(a)", U),
    case("vacuous universal", &["∀x (P(x) → Q(x))"], "∃x Q(x)", U),
    case("no reflexive witness", &["∃x ∃y R(x, y)"], "∃x R(x, x)", U),
    by_hand("function image", &["∀x (P(x) → Q(f(x)))", "P(a)"], "Q(a)", U),
];

impl HandCase {
    pub fn parsed(&self) -> (Vec<Formula>, Formula) {
        let premises = self.premises.iter().map(|p| parse_formula(p).unwrap()).collect();
        (premises, parse_formula(self.conclusion).unwrap())
    }
}
