//! Convert sentences to clauses: connectives eliminated, negation pushed
//! inward, existentials Skolemized and variables renamed apart.

use entailbench::clausal::{clausify, eliminate_connectives, to_nnf};
use entailbench::fol::{parse_formula, render};

fn main() {
    let inputs = ["∀x (Person(x) → ∃y Mother(y, x))", "¬∀x (P(x) ↔ Q(x))", "(A ⊕ B) ∨ C"];
    let mut formulas = Vec::new();
    for text in inputs {
        let f = parse_formula(text).unwrap();
        println!("{text}");
        println!("  nnf: {}", render(&to_nnf(&eliminate_connectives(&f))));
        formulas.push(f);
    }
    let cs = clausify(&formulas).unwrap();
    println!("\n{} clauses:", cs.len());
    for c in &cs.clauses {
        println!("  [{}] {c}", c.id);
    }
}
