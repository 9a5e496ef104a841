//! Recursive-descent parser.
//!
//! Precedence, tightest first: `¬`, `∧`, `∨`, `⊕`, `→`, `↔`. `→` is
//! right-associative, `⊕` and `↔` associate to the left. A quantifier's
//! scope runs to the enclosing close parenthesis or the end of input.
//! Identifiers bound by an enclosing quantifier become variables; every
//! other term identifier is a constant.

use super::ast::{Atom, Formula, Term};
use super::lexer::{tokenize, Token, TokenKind};
use super::{Imbalance, SyntaxError};

pub fn parse_formula(text: &str) -> Result<Formula, SyntaxError> {
    check_balance(text)?;
    let tokens = tokenize(text)?;
    if tokens.is_empty() {
        return Err(SyntaxError::new(0, "a formula", "end of input"));
    }
    let mut p = Parser {
        tokens: &tokens,
        pos: 0,
        end: text.len(),
        bound: Vec::new(),
    };
    let f = p.iff()?;
    if let Some(tok) = p.peek() {
        return Err(SyntaxError::new(
            tok.span.start,
            "a binary connective or end of input",
            tok.kind.describe(),
        ));
    }
    Ok(f)
}

/// Reports the first parenthesis imbalance, if any, before parsing proper.
pub fn check_balance(text: &str) -> Result<(), SyntaxError> {
    let mut open = Vec::new();
    for (i, c) in text.char_indices() {
        match c {
            '(' => open.push(i),
            ')' if open.pop().is_none() => {
                let mut err = SyntaxError::new(i, "no unmatched `)`", "`)`");
                err.imbalance = Some(Imbalance::UnmatchedClose { position: i });
                return Err(err);
            }
            _ => {}
        }
    }
    if !open.is_empty() {
        let mut err = SyntaxError::new(
            text.len(),
            format!("{} more `)`", open.len()),
            "end of input",
        );
        err.imbalance = Some(Imbalance::Unclosed { open_positions: open });
        return Err(err);
    }
    Ok(())
}

struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
    end: usize,
    bound: Vec<String>,
}

impl<'t> Parser<'t> {
    fn peek(&self) -> Option<&'t Token> {
        self.tokens.get(self.pos)
    }

    fn peek_kind(&self) -> Option<&'t TokenKind> {
        self.peek().map(|t| &t.kind)
    }

    fn bump(&mut self) -> Option<&'t Token> {
        let t = self.tokens.get(self.pos);
        self.pos += 1;
        t
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek_kind() == Some(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn error(&self, expected: &str) -> SyntaxError {
        match self.peek() {
            Some(tok) => SyntaxError::new(tok.span.start, expected, tok.kind.describe()),
            None => SyntaxError::new(self.end, expected, "end of input"),
        }
    }

    fn expect(&mut self, kind: TokenKind) -> Result<(), SyntaxError> {
        if self.eat(&kind) {
            Ok(())
        } else {
            Err(self.error(&kind.describe()))
        }
    }

    fn iff(&mut self) -> Result<Formula, SyntaxError> {
        let mut lhs = self.implication()?;
        while self.eat(&TokenKind::Iff) {
            let rhs = self.implication()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Formula, SyntaxError> {
        let lhs = self.exclusive_or()?;
        if self.eat(&TokenKind::Implies) {
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn exclusive_or(&mut self) -> Result<Formula, SyntaxError> {
        let mut lhs = self.disjunction()?;
        while self.eat(&TokenKind::Xor) {
            let rhs = self.disjunction()?;
            lhs = Formula::xor(lhs, rhs);
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, SyntaxError> {
        let mut parts = vec![self.conjunction()?];
        while self.eat(&TokenKind::Or) {
            parts.push(self.conjunction()?);
        }
        Ok(Formula::or(parts))
    }

    fn conjunction(&mut self) -> Result<Formula, SyntaxError> {
        let mut parts = vec![self.unary()?];
        while self.eat(&TokenKind::And) {
            parts.push(self.unary()?);
        }
        Ok(Formula::and(parts))
    }

    fn unary(&mut self) -> Result<Formula, SyntaxError> {
        match self.peek_kind() {
            Some(TokenKind::Not) => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Some(TokenKind::Forall) | Some(TokenKind::Exists) => {
                let universal = matches!(self.bump().unwrap().kind, TokenKind::Forall);
                let var = match self.peek_kind() {
                    Some(TokenKind::Ident(v)) => v.clone(),
                    _ => return Err(self.error("a quantified variable")),
                };
                self.bump();
                self.bound.push(var.clone());
                let body = self.iff();
                self.bound.pop();
                let body = body?;
                Ok(if universal {
                    Formula::forall(var, body)
                } else {
                    Formula::exists(var, body)
                })
            }
            Some(TokenKind::LParen) => {
                self.bump();
                let inner = self.iff()?;
                self.expect(TokenKind::RParen)?;
                Ok(inner)
            }
            Some(TokenKind::Ident(name)) => {
                self.bump();
                let args = if self.peek_kind() == Some(&TokenKind::LParen) {
                    self.bump();
                    self.term_list()?
                } else {
                    Vec::new()
                };
                Ok(Formula::Atom(Atom::new(name.clone(), args)))
            }
            _ => Err(self.error("a formula")),
        }
    }

    fn term_list(&mut self) -> Result<Vec<Term>, SyntaxError> {
        let mut args = vec![self.term()?];
        while self.eat(&TokenKind::Comma) {
            args.push(self.term()?);
        }
        self.expect(TokenKind::RParen)?;
        Ok(args)
    }

    fn term(&mut self) -> Result<Term, SyntaxError> {
        let name = match self.peek_kind() {
            Some(TokenKind::Ident(n)) => n.clone(),
            _ => return Err(self.error("a term")),
        };
        self.bump();
        if self.peek_kind() == Some(&TokenKind::LParen) {
            self.bump();
            let args = self.term_list()?;
            return Ok(Term::App(name, args));
        }
        if self.bound.contains(&name) {
            Ok(Term::Var(name))
        } else {
            Ok(Term::Const(name))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atom(p: &str, args: Vec<Term>) -> Formula {
        Formula::atom(p, args)
    }

    #[test]
    fn universal_implication() {
        let f = parse_formula("∀x (P(x) → Q(x))").unwrap();
        let x = || Term::var("x");
        assert_eq!(
            f,
            Formula::forall("x", Formula::implies(atom("P", vec![x()]), atom("Q", vec![x()])))
        );
    }

    #[test]
    fn conjunction_with_negation() {
        let a = || Term::constant("a");
        assert_eq!(
            parse_formula("P(a) ∧ ¬Q(a)").unwrap(),
            Formula::And(vec![atom("P", vec![a()]), Formula::not(atom("Q", vec![a()]))])
        );
    }

    #[test]
    fn unclosed_parenthesis_reports_direction() {
        let err = parse_formula("∀x (P(x) → Q(x)").unwrap_err();
        assert_eq!(err.imbalance, Some(Imbalance::Unclosed { open_positions: vec![5] }));
        assert_eq!(err.position, "∀x (P(x) → Q(x)".len());

        let err = parse_formula("P(a))").unwrap_err();
        assert_eq!(err.imbalance, Some(Imbalance::UnmatchedClose { position: 4 }));
    }

    #[test]
    fn precedence_ladder() {
        let p = |n: &str| atom(n, vec![]);
        // ¬ > ∧ > ∨ > ⊕ > → > ↔
        let f = parse_formula("¬A ∧ B ∨ C ⊕ D → E ↔ F").unwrap();
        let expected = Formula::iff(
            Formula::implies(
                Formula::xor(
                    Formula::Or(vec![Formula::And(vec![Formula::not(p("A")), p("B")]), p("C")]),
                    p("D"),
                ),
                p("E"),
            ),
            p("F"),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn implication_is_right_associative() {
        let p = |n: &str| atom(n, vec![]);
        assert_eq!(
            parse_formula("A → B → C").unwrap(),
            Formula::implies(p("A"), Formula::implies(p("B"), p("C")))
        );
        assert_eq!(
            parse_formula("A ⊕ B ⊕ C").unwrap(),
            Formula::xor(Formula::xor(p("A"), p("B")), p("C"))
        );
    }

    #[test]
    fn quantifier_scope_extends_right() {
        let f = parse_formula("∀x P(x) → Q(x)").unwrap();
        assert!(matches!(f, Formula::Forall(_, ref b) if matches!(**b, Formula::Implies(..))));
        let g = parse_formula("(∀x P(x)) → Q(a)").unwrap();
        assert!(matches!(g, Formula::Implies(..)));
    }

    #[test]
    fn binding_decides_variable_versus_constant() {
        let f = parse_formula("∀x R(x, y, f(x))").unwrap();
        let expected = Formula::forall(
            "x",
            atom(
                "R",
                vec![Term::var("x"), Term::constant("y"), Term::app("f", vec![Term::var("x")])],
            ),
        );
        assert_eq!(f, expected);
        // x is free outside the quantifier scope
        let g = parse_formula("(∀x P(x)) ∧ Q(x)").unwrap();
        let Formula::And(parts) = g else { panic!() };
        assert_eq!(parts[1], atom("Q", vec![Term::constant("x")]));
    }

    #[test]
    fn ascii_aliases_match_unicode() {
        let pairs = [
            ("forall x (P(x) -> Q(x))", "∀x (P(x) → Q(x))"),
            ("exists x (P(x) & Q(x))", "∃x (P(x) ∧ Q(x))"),
            ("P(a) | Q(a)", "P(a) ∨ Q(a)"),
            ("~P(a)", "¬P(a)"),
            ("-P(a)", "¬P(a)"),
            ("P(a) <-> Q(a)", "P(a) ↔ Q(a)"),
            ("P(a) xor Q(a)", "P(a) ⊕ Q(a)"),
        ];
        for (ascii, uni) in pairs {
            assert_eq!(parse_formula(ascii).unwrap(), parse_formula(uni).unwrap(), "{ascii}");
        }
    }

    #[test]
    fn error_positions() {
        let err = parse_formula("P(a) ∧").unwrap_err();
        assert_eq!(err.position, "P(a) ∧".len());
        assert!(err.imbalance.is_none());
        let err = parse_formula("P(a) Q(a)").unwrap_err();
        assert_eq!(err.position, 5);
        assert!(parse_formula("").is_err());
        assert!(parse_formula("   ").is_err());
        assert!(parse_formula("P()").is_err());
        assert!(parse_formula("∀ (P(x))").is_err());
    }
}
