//! Seeded defect injection for exercising the repair loop. Each corrupted
//! instance carries exactly one edit, and the edit is kept only if the
//! verifier notices it (a parse failure or a changed verdict).

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use super::{naming_key, DatasetInstance, DefectClass, FolField, Verifier};
use crate::fol::lexer::{tokenize, Token, TokenKind};
use crate::fol::is_identifier;

const ATTEMPTS: usize = 40;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Corruption {
    pub id: String,
    pub class: DefectClass,
    pub field: FolField,
    pub before: String,
    pub after: String,
}

fn binders(tokens: &[Token]) -> BTreeSet<String> {
    tokens
        .windows(2)
        .filter(|w| matches!(w[0].kind, TokenKind::Forall | TokenKind::Exists))
        .filter_map(|w| match &w[1].kind {
            TokenKind::Ident(s) => Some(s.clone()),
            _ => None,
        })
        .collect()
}

/// Byte spans of predicate, function and constant occurrences.
fn symbol_spans(text: &str) -> Vec<(std::ops::Range<usize>, String)> {
    let Ok(tokens) = tokenize(text) else {
        return Vec::new();
    };
    let bound = binders(&tokens);
    tokens
        .into_iter()
        .filter_map(|t| match t.kind {
            TokenKind::Ident(name) if !bound.contains(&name) => Some((t.span, name)),
            _ => None,
        })
        .collect()
}

fn splice(text: &str, span: std::ops::Range<usize>, with: &str) -> String {
    format!("{}{}{}", &text[..span.start], with, &text[span.end..])
}

fn paren_edit<R: Rng>(text: &str, rng: &mut R) -> Option<String> {
    let tokens = tokenize(text).ok()?;
    let closes: Vec<&Token> = tokens.iter().filter(|t| t.kind == TokenKind::RParen).collect();
    if !closes.is_empty() && rng.gen_bool(0.5) {
        let t = closes.choose(rng)?;
        return Some(splice(text, t.span.clone(), ""));
    }
    let at = tokens.choose(rng)?.span.end;
    Some(format!("{}){}", &text[..at], &text[at..]))
}

fn typo<R: Rng>(name: &str, rng: &mut R) -> String {
    let mut chars: Vec<char> = name.chars().collect();
    let letter = |rng: &mut R, upper: bool| {
        let c = (b'a' + rng.gen_range(0..26)) as char;
        if upper {
            c.to_ascii_uppercase()
        } else {
            c
        }
    };
    let n = chars.len();
    match rng.gen_range(0..4) {
        0 if n > 2 => {
            chars.remove(rng.gen_range(1..n));
        }
        1 if n > 2 => {
            let i = rng.gen_range(1..n - 1);
            chars.swap(i, i + 1);
        }
        2 => {
            let i = rng.gen_range(1..=n);
            chars.insert(i, letter(rng, false));
        }
        _ => {
            let i = rng.gen_range(0..n);
            chars[i] = letter(rng, chars[i].is_ascii_uppercase());
        }
    }
    chars.into_iter().collect()
}

fn words(name: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for part in name.split(['_', '-']).filter(|p| !p.is_empty()) {
        let mut cur = String::new();
        for c in part.chars() {
            if c.is_ascii_uppercase() && !cur.is_empty() {
                out.push(std::mem::take(&mut cur));
            }
            cur.push(c);
        }
        if !cur.is_empty() {
            out.push(cur);
        }
    }
    out
}

fn capitalized(w: &str) -> String {
    let lower = w.to_ascii_lowercase();
    let mut c = lower.chars();
    match c.next() {
        Some(f) => f.to_ascii_uppercase().to_string() + c.as_str(),
        None => String::new(),
    }
}

/// Other spellings of `name` under common conventions, same naming key.
fn restyles(name: &str) -> Vec<String> {
    let w = words(name);
    let lower: Vec<String> = w.iter().map(|s| s.to_ascii_lowercase()).collect();
    let caps: Vec<String> = w.iter().map(|s| capitalized(s)).collect();
    let mut out = vec![
        lower.join("_"),
        caps.join("-"),
        caps.join("_"),
        caps.join(""),
        lower.join(""),
    ];
    out.retain(|s| s != name && is_identifier(s) && naming_key(s) == naming_key(name));
    out.sort();
    out.dedup();
    out
}

fn is_keyword(s: &str) -> bool {
    matches!(
        s.to_ascii_lowercase().as_str(),
        "forall" | "exists" | "all" | "some" | "not" | "and" | "or" | "xor" | "implies" | "iff"
    )
}

fn one_edit<R: Rng>(
    inst: &DatasetInstance,
    class: DefectClass,
    known: &BTreeSet<String>,
    rng: &mut R,
) -> Option<(FolField, String)> {
    let fields: Vec<FolField> = inst.fol_fields().map(|(f, _)| f).collect();
    let field = *fields.choose(rng)?;
    let text = inst.fol(field);
    let edited = match class {
        DefectClass::Parenthesis => paren_edit(text, rng)?,
        DefectClass::Lexical => {
            let (span, name) = symbol_spans(text).choose(rng)?.clone();
            let new = typo(&name, rng);
            let fresh = new != name
                && is_identifier(&new)
                && !is_keyword(&new)
                && !known.contains(&naming_key(&new));
            if !fresh {
                return None;
            }
            splice(text, span, &new)
        }
        DefectClass::Naming => {
            let (span, name) = symbol_spans(text).choose(rng)?.clone();
            let new = restyles(&name).choose(rng)?.clone();
            splice(text, span, &new)
        }
        DefectClass::Unknown => return None,
    };
    Some((field, edited))
}

/// Applies one defect of `class` to `inst`, retrying until the verifier
/// can observe it. `None` if no observable edit of that class was found.
pub fn corrupt_instance<R: Rng>(
    inst: &DatasetInstance,
    class: DefectClass,
    corpus: &[DatasetInstance],
    verifier: &Verifier,
    rng: &mut R,
) -> Option<(DatasetInstance, Corruption)> {
    let known: BTreeSet<String> = corpus
        .iter()
        .flat_map(|i| i.fol_fields().flat_map(|(_, t)| symbol_spans(t)).map(|(_, n)| naming_key(&n)).collect::<Vec<_>>())
        .collect();
    for _ in 0..ATTEMPTS {
        let Some((field, edited)) = one_edit(inst, class, &known, rng) else {
            continue;
        };
        let mut out = inst.clone();
        *out.fol_mut(field) = edited.clone();
        let observable = match verifier.verify(&out) {
            Ok(report) => !report.matches_expected,
            Err(_) => true,
        };
        if observable {
            let corruption = Corruption {
                id: inst.id.clone(),
                class,
                field,
                before: inst.fol(field).to_string(),
                after: edited,
            };
            return Some((out, corruption));
        }
    }
    None
}

/// Corrupts every instance with a class drawn uniformly from parenthesis,
/// lexical and naming defects, falling back to a parenthesis defect when
/// the drawn class has no observable edit.
pub fn corrupt_dataset<R: Rng>(
    instances: &[DatasetInstance],
    verifier: &Verifier,
    rng: &mut R,
) -> (Vec<DatasetInstance>, Vec<Corruption>) {
    let classes = [DefectClass::Parenthesis, DefectClass::Lexical, DefectClass::Naming];
    let mut out = Vec::with_capacity(instances.len());
    let mut log = Vec::new();
    for inst in instances {
        let class = *classes.choose(rng).expect("nonempty");
        let hit = corrupt_instance(inst, class, instances, verifier, rng)
            .or_else(|| corrupt_instance(inst, DefectClass::Parenthesis, instances, verifier, rng));
        match hit {
            Some((bad, c)) => {
                out.push(bad);
                log.push(c);
            }
            None => out.push(inst.clone()),
        }
    }
    (out, log)
}
