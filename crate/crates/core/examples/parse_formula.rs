//! Parse formulas written with Unicode or ASCII connectives and print their
//! canonical form, or the byte offset where parsing failed.

use entailbench::fol::{infer_signature, parse_formula, render};

fn main() {
    let inputs = [
        "forall x (Student(x) -> exists y (Reads(x, y) & Book(y)))",
        "∀x (Cat(x) ⊕ Dog(x))",
        "~P(a) | Q(a) <-> R",
        "∀x (P(x) → Q(x)",
        "P(a) & & Q(a)",
    ];
    for text in inputs {
        match parse_formula(text) {
            Ok(f) => {
                let sig = infer_signature(std::slice::from_ref(&f)).expect("consistent arities");
                println!("{text}\n  => {}", render(&f));
                for (name, role, arity) in sig.symbols() {
                    println!("     {name}: {role:?}/{arity}");
                }
            }
            Err(e) => println!("{text}\n  !! {e}"),
        }
    }
}
