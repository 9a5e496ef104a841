//! Refute a clause set and replay the proof with the independent checker.

use entailbench::clausal::clausify;
use entailbench::fol::{parse_formula, Formula};
use entailbench::prover::{refute, verify_derivation, Budget};

fn main() {
    let mut formulas: Vec<Formula> = ["∀x (Human(x) → Mortal(x))", "∀x (Greek(x) → Human(x))", "Greek(socrates)"]
        .iter()
        .map(|s| parse_formula(s).unwrap())
        .collect();
    formulas.push(Formula::not(parse_formula("Mortal(socrates)").unwrap()));

    let cs = clausify(&formulas).unwrap();
    let verdict = refute(&cs, &Budget::default());
    println!("unsat: {}, {:?}", verdict.is_unsat(), verdict.stats);
    if let Some(proof) = verdict.proof() {
        for step in proof {
            println!("  [{}] {:30} {:?}", step.id, step.clause, step.provenance);
        }
        match verify_derivation(&cs, proof) {
            Ok(()) => println!("proof replays"),
            Err(e) => println!("proof rejected: {e}"),
        }
    }
}
