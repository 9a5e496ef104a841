//! Write a problem in TPTP FOF syntax. With `ENTAILBENCH_TPTP_PROVER` set
//! to an SZS-speaking prover, also classify it externally.

use std::time::Duration;

use entailbench::fol::parse_formula;
use entailbench::prover::{export_tptp, ExternalProver};

fn main() {
    let premises: Vec<_> = ["∀x (Dog(x) → Animal(x))", "Dog(rex)"].iter().map(|s| parse_formula(s).unwrap()).collect();
    let conclusion = parse_formula("∃y Animal(y)").unwrap();
    print!("{}", export_tptp(&premises, Some(&conclusion)).unwrap());

    match ExternalProver::from_env() {
        Some(prover) => match prover.classify(&premises, &conclusion, Duration::from_secs(30)) {
            Ok(label) => println!("external prover: {label}"),
            Err(e) => println!("external prover failed: {e}"),
        },
        None => println!("(no external prover configured)"),
    }
}
