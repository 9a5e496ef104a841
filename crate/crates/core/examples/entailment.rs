//! Three-way entailment: does a set of premises prove the conclusion, its
//! negation, or neither?

use entailbench::fol::parse_formula;
use entailbench::prover::{classify_entailment, Budget};

fn main() {
    let premises: Vec<_> = [
        "∀x (Bird(x) ∧ ¬Penguin(x) → Flies(x))",
        "∀x (Penguin(x) → Bird(x))",
        "Bird(tweety)",
        "Penguin(pingu)",
    ]
    .iter()
    .map(|s| parse_formula(s).unwrap())
    .collect();

    for conclusion in ["Bird(pingu)", "Flies(pingu)", "Flies(tweety) ∨ Penguin(tweety)", "¬Bird(tweety)"] {
        let c = parse_formula(conclusion).unwrap();
        let r = classify_entailment(&premises, &c, &Budget::default()).unwrap();
        println!(
            "{conclusion:40} {:9} conclusive={} premises={:?}",
            r.label.as_str(),
            r.conclusive,
            r.premise_consistency
        );
    }
}
