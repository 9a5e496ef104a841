use std::fmt::{self, Display, Write};

use super::ast::{Atom, Formula, Term};

// Binding strength used to decide where parentheses are needed.
const IFF: u8 = 1;
const IMPLIES: u8 = 2;
const XOR: u8 = 3;
const OR: u8 = 4;
const AND: u8 = 5;
const NOT: u8 = 6;
const ATOM: u8 = 7;

fn precedence(f: &Formula) -> u8 {
    match f {
        Formula::Atom(_) => ATOM,
        Formula::Not(_) => NOT,
        Formula::And(_) => AND,
        Formula::Or(_) => OR,
        Formula::Xor(..) => XOR,
        Formula::Implies(..) => IMPLIES,
        Formula::Iff(..) => IFF,
        // Quantifiers extend to the right as far as possible, so as an
        // operand they always need parentheses.
        Formula::Forall(..) | Formula::Exists(..) => 0,
    }
}

/// Canonical Unicode rendering. The output parses back to the same tree.
pub fn render(f: &Formula) -> String {
    f.to_string()
}

impl Display for Term {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(n) | Term::Const(n) => out.write_str(n),
            Term::App(n, args) => {
                out.write_str(n)?;
                write_args(out, args)
            }
        }
    }
}

fn write_args(out: &mut impl Write, args: &[Term]) -> fmt::Result {
    out.write_char('(')?;
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            out.write_str(", ")?;
        }
        write!(out, "{a}")?;
    }
    out.write_char(')')
}

impl Display for Atom {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        out.write_str(&self.predicate)?;
        if !self.args.is_empty() {
            write_args(out, &self.args)?;
        }
        Ok(())
    }
}

impl Display for Formula {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(out, self, 0)
    }
}

fn write_formula(out: &mut fmt::Formatter<'_>, f: &Formula, min: u8) -> fmt::Result {
    let wrap = precedence(f) < min;
    if wrap {
        out.write_char('(')?;
    }
    match f {
        Formula::Atom(a) => write!(out, "{a}")?,
        Formula::Not(inner) => {
            out.write_char('¬')?;
            write_formula(out, inner, NOT)?;
        }
        Formula::And(parts) => write_junction(out, parts, " ∧ ", AND + 1)?,
        Formula::Or(parts) => write_junction(out, parts, " ∨ ", OR + 1)?,
        Formula::Xor(a, b) => write_binary(out, a, " ⊕ ", b, XOR, XOR + 1)?,
        Formula::Implies(a, b) => write_binary(out, a, " → ", b, IMPLIES + 1, IMPLIES)?,
        Formula::Iff(a, b) => write_binary(out, a, " ↔ ", b, IFF, IFF + 1)?,
        Formula::Forall(v, body) => write_quantifier(out, '∀', v, body)?,
        Formula::Exists(v, body) => write_quantifier(out, '∃', v, body)?,
    }
    if wrap {
        out.write_char(')')?;
    }
    Ok(())
}

fn write_junction(
    out: &mut fmt::Formatter<'_>,
    parts: &[Formula],
    sep: &str,
    min: u8,
) -> fmt::Result {
    for (i, p) in parts.iter().enumerate() {
        if i > 0 {
            out.write_str(sep)?;
        }
        write_formula(out, p, min)?;
    }
    Ok(())
}

fn write_binary(
    out: &mut fmt::Formatter<'_>,
    lhs: &Formula,
    op: &str,
    rhs: &Formula,
    lmin: u8,
    rmin: u8,
) -> fmt::Result {
    write_formula(out, lhs, lmin)?;
    out.write_str(op)?;
    write_formula(out, rhs, rmin)
}

fn write_quantifier(out: &mut fmt::Formatter<'_>, q: char, var: &str, body: &Formula) -> fmt::Result {
    write!(out, "{q}{var} ")?;
    let binary = (IFF..=AND).contains(&precedence(body));
    if binary {
        out.write_char('(')?;
        write_formula(out, body, 0)?;
        out.write_char(')')
    } else {
        write_formula(out, body, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fol::parse_formula;

    #[test]
    fn canonical_forms() {
        let x = || Term::var("x");
        let a = || Term::constant("a");
        let f = Formula::forall(
            "x",
            Formula::implies(Formula::atom("P", vec![x()]), Formula::atom("Q", vec![x()])),
        );
        assert_eq!(render(&f), "∀x (P(x) → Q(x))");
        assert_eq!(render(&Formula::atom("P", vec![a()])), "P(a)");
        let g = Formula::xor(Formula::atom("P", vec![a()]), Formula::atom("Q", vec![a()]));
        assert_eq!(render(&g), "P(a) ⊕ Q(a)");
    }

    #[test]
    fn parenthesization_round_trips() {
        for src in [
            "¬(P ∧ Q)",
            "(A → B) → C",
            "A → B → C",
            "A ⊕ (B ⊕ C)",
            "(A ↔ B) ∧ C",
            "(∀x P(x)) ∧ Q(a)",
            "¬(∃x P(x))",
            "∀x ∃y R(x, y)",
            "∀x ¬P(x)",
            "A ∨ B ∧ C",
            "(A ∨ B) ∧ C",
            "F(g(a, b), c)",
        ] {
            let f = parse_formula(src).unwrap();
            assert_eq!(parse_formula(&render(&f)).unwrap(), f, "{src}");
        }
        assert_eq!(render(&parse_formula("A ∨ (B ∧ C)").unwrap()), "A ∨ B ∧ C");
    }
}
