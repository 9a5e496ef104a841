//! Template-generated, solver-verified entailment instances over a shared
//! vocabulary. Every instance has unique NL text and a label the prover
//! establishes conclusively with consistent premises.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{DatasetInstance, Verifier};
use crate::fol::Label;

#[derive(Debug, Clone, Copy)]
enum Phrase {
    Noun(&'static str, &'static str),
    Adj(&'static str),
    Verb(&'static str, &'static str),
}

#[derive(Debug, Clone, Copy)]
struct Unary {
    name: &'static str,
    phrase: Phrase,
}

impl Unary {
    fn is(&self) -> String {
        match self.phrase {
            Phrase::Noun(sg, _) => format!("is {sg}"),
            Phrase::Adj(a) => format!("is {a}"),
            Phrase::Verb(sg, _) => sg.to_string(),
        }
    }

    fn is_not(&self) -> String {
        match self.phrase {
            Phrase::Noun(sg, _) => format!("is not {sg}"),
            Phrase::Adj(a) => format!("is not {a}"),
            Phrase::Verb(_, pl) => format!("does not {pl}"),
        }
    }

    fn are(&self) -> String {
        match self.phrase {
            Phrase::Noun(_, pl) => format!("are {pl}"),
            Phrase::Adj(a) => format!("are {a}"),
            Phrase::Verb(_, pl) => pl.to_string(),
        }
    }

    fn people(&self) -> String {
        match self.phrase {
            Phrase::Noun(_, pl) => pl.to_string(),
            Phrase::Adj(a) => format!("{a} people"),
            Phrase::Verb(_, pl) => format!("people who {pl}"),
        }
    }
}

const UNARY: &[Unary] = &[
    Unary { name: "Student", phrase: Phrase::Noun("a student", "students") },
    Unary { name: "Athlete", phrase: Phrase::Noun("an athlete", "athletes") },
    Unary { name: "Musician", phrase: Phrase::Noun("a musician", "musicians") },
    Unary { name: "Painter", phrase: Phrase::Noun("a painter", "painters") },
    Unary { name: "Teacher", phrase: Phrase::Noun("a teacher", "teachers") },
    Unary { name: "Scientist", phrase: Phrase::Noun("a scientist", "scientists") },
    Unary { name: "Farmer", phrase: Phrase::Noun("a farmer", "farmers") },
    Unary { name: "Doctor", phrase: Phrase::Noun("a doctor", "doctors") },
    Unary { name: "Tall", phrase: Phrase::Adj("tall") },
    Unary { name: "Happy", phrase: Phrase::Adj("happy") },
    Unary { name: "Curious", phrase: Phrase::Adj("curious") },
    Unary { name: "Wealthy", phrase: Phrase::Adj("wealthy") },
    Unary { name: "LovesMusic", phrase: Phrase::Verb("loves music", "love music") },
    Unary { name: "PlaysChess", phrase: Phrase::Verb("plays chess", "play chess") },
    Unary { name: "DrinksCoffee", phrase: Phrase::Verb("drinks coffee", "drink coffee") },
    Unary { name: "OwnsBicycle", phrase: Phrase::Verb("owns a bicycle", "own a bicycle") },
];

/// Binary relations: symbol, third-person verb, base verb.
const BINARY: &[(&str, &str, &str)] = &[
    ("Admires", "admires", "admire"),
    ("Knows", "knows", "know"),
    ("Mentors", "mentors", "mentor"),
    ("Trusts", "trusts", "trust"),
];

const PEOPLE: &[&str] = &[
    "alice", "bruno", "clara", "dmitri", "elena", "farid", "greta", "hugo", "ingrid", "jonas",
];

fn name(c: &str) -> String {
    let mut s = c.to_string();
    s[..1].make_ascii_uppercase();
    s
}

struct Draft {
    premises: Vec<(String, String)>,
    conclusions: [(String, String); 3],
}

fn fact(p: &Unary, c: &str) -> (String, String) {
    (format!("{} {}.", name(c), p.is()), format!("{}({c})", p.name))
}

fn not_fact(p: &Unary, c: &str) -> (String, String) {
    (format!("{} {}.", name(c), p.is_not()), format!("¬{}({c})", p.name))
}

fn all(a: &Unary, b: &Unary) -> (String, String) {
    (
        format!("All {} {}.", a.people(), b.are()),
        format!("∀x ({}(x) → {}(x))", a.name, b.name),
    )
}

fn none(a: &Unary, b: &Unary) -> (String, String) {
    (
        format!("No {} {}.", a.people(), b.are()),
        format!("∀x ({}(x) → ¬{}(x))", a.name, b.name),
    )
}

fn some(a: &Unary, b: &Unary) -> (String, String) {
    (
        format!("Some {} {}.", a.people(), b.are()),
        format!("∃x ({}(x) ∧ {}(x))", a.name, b.name),
    )
}

/// One draft per template; conclusions are ordered True, False, Uncertain
/// by intent, and the solver has the final word.
fn draft<R: Rng>(rng: &mut R) -> Draft {
    let mut preds: Vec<&Unary> = UNARY.iter().collect();
    preds.shuffle(rng);
    let (a, b, c, d) = (preds[0], preds[1], preds[2], preds[3]);
    let mut people: Vec<&str> = PEOPLE.to_vec();
    people.shuffle(rng);
    let (x, y) = (people[0], people[1]);
    match rng.gen_range(0..9) {
        0 => Draft {
            premises: vec![all(a, b), fact(a, x)],
            conclusions: [fact(b, x), not_fact(b, x), fact(b, y)],
        },
        1 => Draft {
            premises: vec![all(a, b), all(b, c), fact(a, x)],
            conclusions: [fact(c, x), not_fact(c, x), fact(d, x)],
        },
        2 => Draft {
            premises: vec![none(a, b), fact(a, x)],
            conclusions: [not_fact(b, x), fact(b, x), fact(b, y)],
        },
        3 => Draft {
            premises: vec![all(a, b), fact(b, x)],
            conclusions: [fact(b, x), not_fact(b, x), fact(a, x)],
        },
        4 => Draft {
            premises: vec![
                (
                    format!("{} {} or {}.", name(x), a.is(), b.is()),
                    format!("{}({x}) ∨ {}({x})", a.name, b.name),
                ),
                not_fact(a, x),
            ],
            conclusions: [fact(b, x), not_fact(b, x), fact(c, x)],
        },
        5 => Draft {
            premises: vec![
                (
                    format!("{} either {} or {}, but not both.", name(x), a.is(), b.is()),
                    format!("{}({x}) ⊕ {}({x})", a.name, b.name),
                ),
                fact(a, x),
            ],
            conclusions: [not_fact(b, x), fact(b, x), fact(c, x)],
        },
        6 => Draft {
            premises: vec![
                (
                    format!("{} {} if and only if {} {}.", name(x), a.is(), name(x), b.is()),
                    format!("{}({x}) ↔ {}({x})", a.name, b.name),
                ),
                not_fact(b, x),
            ],
            conclusions: [not_fact(a, x), fact(a, x), fact(c, x)],
        },
        7 => Draft {
            premises: vec![some(a, b), all(b, c)],
            conclusions: [some(a, c), none(a, c), some(a, d)],
        },
        _ => {
            let mut rels: Vec<&(&str, &str, &str)> = BINARY.iter().collect();
            rels.shuffle(rng);
            let (r, s) = (rels[0], rels[1]);
            let holds = |rel: &(&str, &str, &str), p: &str, q: &str| {
                (format!("{} {} {}.", name(p), rel.1, name(q)), format!("{}({p}, {q})", rel.0))
            };
            Draft {
                premises: vec![
                    (
                        format!("Whoever {} someone is {} by that person.", r.1, past(s.2)),
                        format!("∀x ∀y ({}(x, y) → {}(y, x))", r.0, s.0),
                    ),
                    holds(r, x, y),
                ],
                conclusions: [
                    holds(s, y, x),
                    (
                        format!("{} does not {} {}.", name(y), s.2, name(x)),
                        format!("¬{}({y}, {x})", s.0),
                    ),
                    holds(s, x, y),
                ],
            }
        }
    }
}

fn past(base: &str) -> String {
    match base {
        "admire" => "admired".into(),
        "know" => "known".into(),
        other => format!("{other}ed"),
    }
}

/// A distracting extra fact about someone, if it keeps the text unique.
fn distractor<R: Rng>(rng: &mut R) -> (String, String) {
    let p = UNARY.choose(rng).expect("vocabulary");
    let c = PEOPLE.choose(rng).expect("vocabulary");
    if rng.gen_bool(0.7) {
        fact(p, c)
    } else {
        not_fact(p, c)
    }
}

fn symbols(inst: &DatasetInstance) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for (_, text) in inst.fol_fields() {
        let mut word = String::new();
        for ch in text.chars().chain(std::iter::once(' ')) {
            if ch.is_ascii_alphanumeric() {
                word.push(ch);
            } else if !word.is_empty() {
                if word.len() > 1 {
                    out.insert(std::mem::take(&mut word));
                }
                word.clear();
            }
        }
    }
    out
}

/// `count` verified instances with ids `s000`, `s001`, ..., labels cycling
/// True, False, Uncertain. With `count ≥ 20` every symbol is used by at
/// least two instances, so leave-one-out repair has a reference for it.
pub fn synthetic_dataset(count: usize, seed: u64) -> Vec<DatasetInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let verifier = Verifier::default();
    let mut seen_text = BTreeSet::new();
    let mut out = Vec::with_capacity(count);
    let make = |i: usize, rng: &mut ChaCha8Rng, seen: &mut BTreeSet<String>| loop {
        let target = Label::ALL[i % 3];
        let d = draft(rng);
        let mut premises = d.premises;
        for _ in 0..rng.gen_range(0..=2) {
            premises.push(distractor(rng));
        }
        premises.shuffle(rng);
        let (cnl, cfol) = d.conclusions[i % 3].clone();
        let inst = DatasetInstance {
            id: format!("s{i:03}"),
            premises_nl: premises.iter().map(|p| p.0.clone()).collect(),
            premises_fol: premises.iter().map(|p| p.1.clone()).collect(),
            conclusion_nl: cnl,
            conclusion_fol: cfol,
            expected_label: target,
        };
        let key = format!("{}\n{}", inst.premises_nl.join("\n"), inst.conclusion_nl);
        if seen.contains(&key) {
            continue;
        }
        match verifier.verify(&inst) {
            Ok(r) if r.matches_expected => {
                seen.insert(key);
                return inst;
            }
            _ => continue,
        }
    };
    for i in 0..count {
        out.push(make(i, &mut rng, &mut seen_text));
    }
    if count >= 20 {
        for _ in 0..100 {
            let mut support: BTreeMap<String, usize> = BTreeMap::new();
            for inst in &out {
                for s in symbols(inst) {
                    *support.entry(s).or_default() += 1;
                }
            }
            let lonely: Vec<usize> = (0..out.len())
                .filter(|&i| symbols(&out[i]).iter().any(|s| support[s] < 2))
                .collect();
            if lonely.is_empty() {
                break;
            }
            for i in lonely {
                let old = format!("{}\n{}", out[i].premises_nl.join("\n"), out[i].conclusion_nl);
                seen_text.remove(&old);
                out[i] = make(i, &mut rng, &mut seen_text);
            }
        }
    }
    out
}
