//! The individual repair rules: parenthesis balancing, typo correction
//! against a corpus, and naming normalization.

use entailbench::datapipe::{repair_lexical, repair_naming, repair_parentheses, CorpusSignature};

fn main() {
    let corpus = CorpusSignature::from_texts(&[
        "∀x (Student(x) → Attends(x, lecture))",
        "Student(maria)",
        "∀x (LovesMusic(x) → Happy(x))",
        "LovesMusic(maria)",
    ]);

    for broken in ["∀x (Student(x) → Attends(x, lecture)", "∀x (Student(x) → (Attends(x, lecture)"] {
        println!("{broken}");
        match repair_parentheses(broken) {
            Ok(candidates) => candidates.iter().for_each(|c| println!("  paren   -> {c}")),
            Err(e) => println!("  paren   !! {e}"),
        }
    }

    let typo = "Studnet(maria)";
    println!("{typo}");
    for c in repair_lexical(typo, &corpus).unwrap() {
        println!("  lexical -> {c}");
    }

    let styled = "loves_music(maria) ∧ Happy(maria)";
    println!("{styled}\n  naming  -> {}", repair_naming(styled, &corpus));
}
