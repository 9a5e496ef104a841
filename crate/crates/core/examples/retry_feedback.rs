//! Retry a fallible step, feeding each error into a repair hook that
//! revises the input for the next attempt.

use entailbench::assessor::retry_with_feedback;
use entailbench::datapipe::repair_parentheses;
use entailbench::fol::{parse_formula, render};

fn main() {
    let annotation = "∀x (Bird(x) → (Flies(x) ∨ Penguin(x))".to_string();
    let result = retry_with_feedback(
        annotation,
        |text| parse_formula(text),
        |text, err| {
            println!("attempt failed: {err}");
            repair_parentheses(text).map(|mut c| c.remove(0)).unwrap_or_else(|_| text.clone())
        },
        3,
    );
    match result {
        Ok(ok) => println!("parsed after {} attempt(s): {}", ok.attempts, render(&ok.value)),
        Err(fail) => println!("gave up after {} attempts", fail.attempts()),
    }
}
