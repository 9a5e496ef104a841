//! Tokenizer for the formula surface syntax.
//!
//! Unicode connectives and their ASCII aliases lex to the same token kind.
//! Identifiers may contain `-` between word characters, so `Is-Tall` is one
//! identifier while `P->Q` is `P`, `->`, `Q`.

use std::ops::Range;

use super::SyntaxError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Not,
    And,
    Or,
    Xor,
    Implies,
    Iff,
    Forall,
    Exists,
}

impl TokenKind {
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Ident(s) => format!("identifier `{s}`"),
            TokenKind::LParen => "`(`".into(),
            TokenKind::RParen => "`)`".into(),
            TokenKind::Comma => "`,`".into(),
            TokenKind::Not => "`¬`".into(),
            TokenKind::And => "`∧`".into(),
            TokenKind::Or => "`∨`".into(),
            TokenKind::Xor => "`⊕`".into(),
            TokenKind::Implies => "`→`".into(),
            TokenKind::Iff => "`↔`".into(),
            TokenKind::Forall => "`∀`".into(),
            TokenKind::Exists => "`∃`".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    /// Byte range in the source text.
    pub span: Range<usize>,
}

fn is_word(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

pub fn tokenize(text: &str) -> Result<Vec<Token>, SyntaxError> {
    let mut tokens = Vec::new();
    let mut chars = text.char_indices().peekable();

    while let Some(&(start, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        let single = match c {
            '(' => Some(TokenKind::LParen),
            ')' => Some(TokenKind::RParen),
            ',' => Some(TokenKind::Comma),
            '¬' | '~' => Some(TokenKind::Not),
            '∧' | '&' => Some(TokenKind::And),
            '∨' | '|' => Some(TokenKind::Or),
            '⊕' => Some(TokenKind::Xor),
            '→' => Some(TokenKind::Implies),
            '↔' => Some(TokenKind::Iff),
            '∀' => Some(TokenKind::Forall),
            '∃' => Some(TokenKind::Exists),
            _ => None,
        };
        if let Some(kind) = single {
            chars.next();
            tokens.push(Token {
                kind,
                span: start..start + c.len_utf8(),
            });
            continue;
        }

        if c == '-' {
            chars.next();
            if text[start + 1..].starts_with('>') {
                chars.next();
                tokens.push(Token {
                    kind: TokenKind::Implies,
                    span: start..start + 2,
                });
            } else {
                tokens.push(Token {
                    kind: TokenKind::Not,
                    span: start..start + 1,
                });
            }
            continue;
        }

        if c == '<' {
            if text[start..].starts_with("<->") {
                for _ in 0..3 {
                    chars.next();
                }
                tokens.push(Token {
                    kind: TokenKind::Iff,
                    span: start..start + 3,
                });
                continue;
            }
            return Err(SyntaxError::new(start, "a formula token", "`<`"));
        }

        if c.is_ascii_alphabetic() || c == '_' {
            let mut end = start;
            while let Some(&(i, ch)) = chars.peek() {
                let hyphen_join = ch == '-'
                    && text[i + 1..].chars().next().is_some_and(is_word);
                if is_word(ch) || hyphen_join {
                    end = i + ch.len_utf8();
                    chars.next();
                } else {
                    break;
                }
            }
            let word = &text[start..end];
            let kind = match word {
                "forall" => TokenKind::Forall,
                "exists" => TokenKind::Exists,
                "xor" => TokenKind::Xor,
                _ => TokenKind::Ident(word.to_string()),
            };
            tokens.push(Token {
                kind,
                span: start..end,
            });
            continue;
        }

        return Err(SyntaxError::new(
            start,
            "a formula token",
            format!("character `{c}`"),
        ));
    }
    Ok(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(s: &str) -> Vec<TokenKind> {
        tokenize(s).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn hyphenated_identifiers_versus_arrows() {
        assert_eq!(
            kinds("Is-Tall(a)->Q"),
            vec![
                TokenKind::Ident("Is-Tall".into()),
                TokenKind::LParen,
                TokenKind::Ident("a".into()),
                TokenKind::RParen,
                TokenKind::Implies,
                TokenKind::Ident("Q".into()),
            ]
        );
        assert_eq!(kinds("-P"), vec![TokenKind::Not, TokenKind::Ident("P".into())]);
        assert_eq!(kinds("P <-> Q")[1], TokenKind::Iff);
    }

    #[test]
    fn spans_are_byte_offsets() {
        let toks = tokenize("∀x P(x)").unwrap();
        assert_eq!(toks[0].span, 0..3);
        assert_eq!(toks[1].span, 3..4);
        assert_eq!(toks[2].span, 5..6);
    }

    #[test]
    fn rejects_stray_characters() {
        let err = tokenize("P(a) $ Q").unwrap_err();
        assert_eq!(err.position, 5);
    }
}
