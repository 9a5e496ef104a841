//! Critique/refine interface and the rule-based reference repairers for
//! the three annotation defect classes: unbalanced parentheses, lexical
//! typos in symbol names, and inconsistent naming conventions.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{DatasetInstance, FolField, RepairTrigger, VerifyReport};
use crate::fol::lexer::{tokenize, TokenKind};
use crate::fol::{check_balance, parse_formula, Formula, Imbalance, SymbolRole, Term};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("no repair candidate: {0}")]
pub struct NoCandidate(pub String);

/// What the verifier reported about the instance being repaired.
#[derive(Debug, Clone)]
pub enum Diagnosis {
    Trigger(RepairTrigger),
    Mismatch(VerifyReport),
}

impl std::fmt::Display for Diagnosis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Diagnosis::Trigger(t) => write!(f, "{t}"),
            Diagnosis::Mismatch(r) => {
                let res = &r.result;
                if !res.conclusive {
                    write!(f, "solver inconclusive within budget (label {})", res.label)
                } else if res.premise_consistency != crate::prover::Consistency::Consistent {
                    write!(f, "premises are {:?}", res.premise_consistency)
                } else {
                    write!(f, "solver proves {}", res.label)
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DefectClass {
    Parenthesis,
    Lexical,
    Naming,
    Unknown,
}

/// One suspected error in one annotation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Suspect {
    pub field: FolField,
    pub class: DefectClass,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Critique {
    pub suspects: Vec<Suspect>,
}

/// Replacement FOL annotations for one instance. Carries no NL text or
/// label, so a repairer cannot touch them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub premises_fol: Vec<String>,
    pub conclusion_fol: String,
    pub notes: Vec<String>,
}

impl Candidate {
    pub fn apply_to(&self, inst: &DatasetInstance) -> DatasetInstance {
        DatasetInstance {
            premises_fol: self.premises_fol.clone(),
            conclusion_fol: self.conclusion_fol.clone(),
            ..inst.clone()
        }
    }
}

/// Diagnoses an instance and proposes repaired annotations.
pub trait Repairer: Sync {
    fn critique(&self, inst: &DatasetInstance, diagnosis: &Diagnosis) -> Critique;
    /// Candidates in preference order.
    fn refine(&self, inst: &DatasetInstance, critique: &Critique) -> Vec<Candidate>;
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SymbolKey {
    pub name: String,
    pub role: SymbolRole,
    pub arity: usize,
}

fn symbol_occurrences(f: &Formula, out: &mut Vec<SymbolKey>) {
    fn term(t: &Term, out: &mut Vec<SymbolKey>) {
        match t {
            Term::Var(_) => {}
            Term::Const(c) => out.push(SymbolKey {
                name: c.clone(),
                role: SymbolRole::Constant,
                arity: 0,
            }),
            Term::App(g, args) => {
                out.push(SymbolKey {
                    name: g.clone(),
                    role: SymbolRole::Function,
                    arity: args.len(),
                });
                args.iter().for_each(|a| term(a, out));
            }
        }
    }
    f.for_each_atom(&mut |a| {
        out.push(SymbolKey {
            name: a.predicate.clone(),
            role: SymbolRole::Predicate,
            arity: a.args.len(),
        });
        a.args.iter().for_each(|t| term(t, out));
    });
}

/// Symbol spellings used across a corpus with occurrence counts, kept per
/// instance so one instance can be left out of its own reference.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CorpusSignature {
    counts: BTreeMap<SymbolKey, usize>,
    per_instance: BTreeMap<String, BTreeMap<SymbolKey, usize>>,
}

impl CorpusSignature {
    /// Counts symbols from every annotation that parses.
    pub fn from_instances(instances: &[DatasetInstance]) -> Self {
        let mut sig = CorpusSignature::default();
        for inst in instances {
            let texts: Vec<&str> = inst.fol_fields().map(|(_, t)| t).collect();
            sig.add(&inst.id, &texts);
        }
        sig
    }

    /// Corpus from loose annotation strings, all under one anonymous owner.
    pub fn from_texts(texts: &[&str]) -> Self {
        let mut sig = CorpusSignature::default();
        sig.add("", texts);
        sig
    }

    fn add(&mut self, owner: &str, texts: &[&str]) {
        let mut occ = Vec::new();
        for t in texts {
            if let Ok(f) = parse_formula(t) {
                symbol_occurrences(&f, &mut occ);
            }
        }
        let own = self.per_instance.entry(owner.to_string()).or_default();
        for k in occ {
            *own.entry(k.clone()).or_default() += 1;
            *self.counts.entry(k).or_default() += 1;
        }
    }

    /// The corpus minus one instance's own contribution.
    pub fn without(&self, id: &str) -> CorpusSignature {
        let mut out = self.clone();
        if let Some(own) = out.per_instance.remove(id) {
            for (k, n) in own {
                if let Some(c) = out.counts.get_mut(&k) {
                    *c -= n;
                    if *c == 0 {
                        out.counts.remove(&k);
                    }
                }
            }
        }
        out
    }

    pub fn count(&self, key: &SymbolKey) -> usize {
        self.counts.get(key).copied().unwrap_or(0)
    }

    pub fn is_known(&self, key: &SymbolKey) -> bool {
        self.count(key) > 0
    }

    pub fn symbols(&self) -> impl Iterator<Item = (&SymbolKey, usize)> {
        self.counts.iter().map(|(k, &n)| (k, n))
    }

    /// Most frequent spelling among those equal to `key` up to case,
    /// `_` and `-`; ties go to the lexicographically smaller spelling.
    pub fn dominant_spelling(&self, key: &SymbolKey) -> Option<&str> {
        let target = naming_key(&key.name);
        self.counts
            .iter()
            .filter(|(k, _)| k.role == key.role && k.arity == key.arity && naming_key(&k.name) == target)
            .max_by(|(a, na), (b, nb)| na.cmp(nb).then_with(|| b.name.cmp(&a.name)))
            .map(|(k, _)| k.name.as_str())
    }
}

/// Spelling with case and word separators erased: `is_tall`, `Is-Tall`
/// and `IsTall` all map to `istall`.
pub fn naming_key(name: &str) -> String {
    name.chars()
        .filter(|c| *c != '_' && *c != '-')
        .map(|c| c.to_ascii_lowercase())
        .collect()
}

/// Renames symbol tokens; identifiers bound by a quantifier anywhere in the
/// text are left alone.
fn rename_symbols(text: &str, renames: &BTreeMap<String, String>) -> String {
    let Ok(tokens) = tokenize(text) else {
        return text.to_string();
    };
    let binders: BTreeSet<&str> = tokens
        .windows(2)
        .filter(|w| matches!(w[0].kind, TokenKind::Forall | TokenKind::Exists))
        .filter_map(|w| match &w[1].kind {
            TokenKind::Ident(s) => Some(s.as_str()),
            _ => None,
        })
        .collect();
    let mut out = String::with_capacity(text.len());
    let mut last = 0;
    for tok in &tokens {
        if let TokenKind::Ident(name) = &tok.kind {
            if let Some(new) = renames.get(name) {
                if !binders.contains(name.as_str()) {
                    out.push_str(&text[last..tok.span.start]);
                    out.push_str(new);
                    last = tok.span.end;
                }
            }
        }
    }
    out.push_str(&text[last..]);
    out
}

fn paren_candidates(fol: &str) -> Result<Vec<(String, String)>, NoCandidate> {
    let imbalance = match check_balance(fol) {
        Ok(()) => return Err(NoCandidate("parentheses are balanced".into())),
        Err(e) => match e.imbalance.clone() {
            Some(i) => i,
            None => return Err(NoCandidate(e.to_string())),
        },
    };
    let tokens = tokenize(fol).map_err(|e| NoCandidate(e.to_string()))?;
    let mut edits: Vec<(String, String)> = Vec::new();
    match imbalance {
        Imbalance::Unclosed { open_positions } => {
            if open_positions.len() != 1 {
                return Err(NoCandidate(format!(
                    "{} unclosed parentheses need more than one edit",
                    open_positions.len()
                )));
            }
            let open = open_positions[0];
            // End of text first, then earlier scope ends right to left.
            let mut points: Vec<usize> = tokens
                .iter()
                .filter(|t| t.span.start > open)
                .map(|t| t.span.end)
                .collect();
            points.retain(|&p| p != fol.len());
            points.reverse();
            points.insert(0, fol.len());
            for p in points {
                let text = if p == fol.len() {
                    format!("{})", fol.trim_end())
                } else {
                    format!("{}){}", &fol[..p], &fol[p..])
                };
                edits.push((text, format!("inserted `)` at byte {p}")));
            }
        }
        Imbalance::UnmatchedClose { position } => {
            let mut closes: Vec<usize> = tokens
                .iter()
                .filter(|t| t.kind == TokenKind::RParen && t.span.start <= position)
                .map(|t| t.span.start)
                .collect();
            closes.sort_by_key(|&c| (c != position, std::cmp::Reverse(c)));
            for c in closes {
                let text = format!("{}{}", &fol[..c], &fol[c + 1..]);
                edits.push((text, format!("removed `)` at byte {c}")));
            }
        }
    }
    let mut seen = BTreeSet::new();
    edits.retain(|(t, _)| parse_formula(t).is_ok() && seen.insert(t.clone()));
    if edits.is_empty() {
        return Err(NoCandidate("no single parenthesis edit yields a formula".into()));
    }
    Ok(edits)
}

/// Single-edit rebalancing: insert one `)` at the end of some open scope,
/// or remove the unmatched `)`. Only candidates that parse are returned.
pub fn repair_parentheses(fol: &str) -> Result<Vec<String>, NoCandidate> {
    Ok(paren_candidates(fol)?.into_iter().map(|(t, _)| t).collect())
}

fn unknown_symbols(f: &Formula, sig: &CorpusSignature) -> Vec<SymbolKey> {
    let mut occ = Vec::new();
    symbol_occurrences(f, &mut occ);
    let mut seen = BTreeSet::new();
    occ.into_iter()
        .filter(|k| !sig.is_known(k) && seen.insert(k.clone()))
        .collect()
}

/// Known symbols with the same role and arity within edit distance 2,
/// nearest first, then by corpus frequency, then by spelling.
fn nearest_known(key: &SymbolKey, sig: &CorpusSignature) -> Vec<(String, usize)> {
    let mut near: Vec<(usize, usize, &str)> = sig
        .symbols()
        .filter(|(k, _)| k.role == key.role && k.arity == key.arity && k.name != key.name)
        .filter_map(|(k, n)| {
            let d = strsim::levenshtein(&k.name, &key.name);
            (d <= 2).then_some((d, n, k.name.as_str()))
        })
        .collect();
    near.sort_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)).then(a.2.cmp(b.2)));
    near.into_iter().map(|(d, _, s)| (s.to_string(), d)).collect()
}

fn lexical_candidates(fol: &str, sig: &CorpusSignature) -> Result<Vec<(String, String)>, NoCandidate> {
    let f = parse_formula(fol).map_err(|e| NoCandidate(e.to_string()))?;
    let unknown = unknown_symbols(&f, sig);
    if unknown.is_empty() {
        return Ok(Vec::new());
    }
    let options: Vec<(String, Vec<(String, usize)>)> = unknown
        .iter()
        .map(|k| (k.name.clone(), nearest_known(k, sig)))
        .filter(|(_, near)| !near.is_empty())
        .collect();
    if options.is_empty() {
        let names: Vec<&str> = unknown.iter().map(|k| k.name.as_str()).collect();
        return Err(NoCandidate(format!("nothing within distance 2 of {}", names.join(", "))));
    }
    let best: BTreeMap<String, String> = options.iter().map(|(u, near)| (u.clone(), near[0].0.clone())).collect();
    let describe = |m: &BTreeMap<String, String>| {
        m.iter().map(|(a, b)| format!("replaced `{a}` with `{b}`")).collect::<Vec<_>>().join(", ")
    };
    let mut out = vec![(rename_symbols(fol, &best), describe(&best))];
    for (u, near) in &options {
        for (alt, _) in near.iter().skip(1) {
            let mut m = best.clone();
            m.insert(u.clone(), alt.clone());
            out.push((rename_symbols(fol, &m), describe(&m)));
        }
    }
    Ok(out)
}

/// Replaces every symbol absent from `sig` by its nearest known spelling
/// (same role and arity, edit distance ≤ 2). The first candidate uses the
/// best match for every unknown symbol; later ones vary one choice. An
/// empty list means nothing is unknown.
pub fn repair_lexical(fol: &str, sig: &CorpusSignature) -> Result<Vec<String>, NoCandidate> {
    Ok(lexical_candidates(fol, sig)?.into_iter().map(|(t, _)| t).collect())
}

fn naming_renames(f: &Formula, sig: &CorpusSignature) -> BTreeMap<String, String> {
    let mut occ = Vec::new();
    symbol_occurrences(f, &mut occ);
    let mut renames = BTreeMap::new();
    for k in occ {
        if let Some(dominant) = sig.dominant_spelling(&k) {
            if dominant != k.name {
                renames.insert(k.name.clone(), dominant.to_string());
            }
        }
    }
    renames
}

/// Rewrites case/underscore/hyphen variants of a symbol to the corpus's
/// dominant spelling. Text that does not parse is returned unchanged.
pub fn repair_naming(fol: &str, sig: &CorpusSignature) -> String {
    match parse_formula(fol) {
        Ok(f) => rename_symbols(fol, &naming_renames(&f, sig)),
        Err(_) => fol.to_string(),
    }
}

/// The reference repairer: rule-based critique over a cross-instance
/// signature, where each instance is judged against the rest of the corpus.
#[derive(Debug, Clone)]
pub struct RuleRepairer {
    pub corpus: CorpusSignature,
    pub max_candidates: usize,
}

impl RuleRepairer {
    pub fn new(corpus: CorpusSignature) -> Self {
        RuleRepairer {
            corpus,
            max_candidates: 32,
        }
    }

    pub fn from_instances(instances: &[DatasetInstance]) -> Self {
        Self::new(CorpusSignature::from_instances(instances))
    }

    /// Repair options for one field, best first, each with a note.
    fn field_options(&self, text: &str, classes: &[DefectClass], sig: &CorpusSignature) -> Vec<(String, String)> {
        let mut opts = Vec::new();
        if classes.contains(&DefectClass::Parenthesis) {
            if let Ok(c) = paren_candidates(text) {
                opts.extend(c);
            }
        }
        let named = if classes.contains(&DefectClass::Naming) {
            let n = repair_naming(text, sig);
            if n != text {
                let f = parse_formula(text).expect("naming suspects parse");
                let renames = naming_renames(&f, sig);
                let note = renames
                    .iter()
                    .map(|(a, b)| format!("renamed `{a}` to `{b}`"))
                    .collect::<Vec<_>>()
                    .join(", ");
                opts.push((n.clone(), note));
            }
            Some(n)
        } else {
            None
        };
        if classes.contains(&DefectClass::Lexical) {
            let base = named.as_deref().unwrap_or(text);
            if let Ok(c) = lexical_candidates(base, sig) {
                opts.extend(c);
            }
            if named.is_some() {
                if let Ok(c) = lexical_candidates(text, sig) {
                    opts.extend(c);
                }
            }
        }
        let mut seen = BTreeSet::new();
        opts.retain(|(t, _)| t != text && seen.insert(t.clone()));
        opts
    }
}

impl Repairer for RuleRepairer {
    fn critique(&self, inst: &DatasetInstance, diagnosis: &Diagnosis) -> Critique {
        let sig = self.corpus.without(&inst.id);
        let mut suspects = Vec::new();
        for (field, text) in inst.fol_fields() {
            if let Err(e) = check_balance(text) {
                suspects.push(Suspect {
                    field,
                    class: DefectClass::Parenthesis,
                    detail: e.to_string(),
                });
                continue;
            }
            let f = match parse_formula(text) {
                Ok(f) => f,
                Err(e) => {
                    suspects.push(Suspect {
                        field,
                        class: DefectClass::Unknown,
                        detail: e.to_string(),
                    });
                    continue;
                }
            };
            let renames = naming_renames(&f, &sig);
            if !renames.is_empty() {
                let names: Vec<&str> = renames.keys().map(String::as_str).collect();
                suspects.push(Suspect {
                    field,
                    class: DefectClass::Naming,
                    detail: format!("non-canonical spelling of {}", names.join(", ")),
                });
            }
            let unknown = unknown_symbols(&f, &sig);
            let unexplained: Vec<&str> = unknown
                .iter()
                .filter(|k| !renames.contains_key(&k.name) && !nearest_known(k, &sig).is_empty())
                .map(|k| k.name.as_str())
                .collect();
            if !unexplained.is_empty() {
                suspects.push(Suspect {
                    field,
                    class: DefectClass::Lexical,
                    detail: format!("unknown symbols close to known ones: {}", unexplained.join(", ")),
                });
            }
        }
        if suspects.is_empty() {
            let field = match diagnosis {
                Diagnosis::Trigger(RepairTrigger::Syntax { field, .. } | RepairTrigger::Invalid { field, .. }) => *field,
                _ => FolField::Conclusion,
            };
            suspects.push(Suspect {
                field,
                class: DefectClass::Unknown,
                detail: diagnosis.to_string(),
            });
        }
        Critique { suspects }
    }

    fn refine(&self, inst: &DatasetInstance, critique: &Critique) -> Vec<Candidate> {
        let sig = self.corpus.without(&inst.id);
        let mut by_field: BTreeMap<FolField, Vec<DefectClass>> = BTreeMap::new();
        for s in &critique.suspects {
            by_field.entry(s.field).or_default().push(s.class);
        }
        let options: Vec<(FolField, Vec<(String, String)>)> = by_field
            .iter()
            .map(|(field, classes)| (*field, self.field_options(inst.fol(*field), classes, &sig)))
            .filter(|(_, opts)| !opts.is_empty())
            .collect();
        if options.is_empty() {
            return Vec::new();
        }
        let build = |choice: &[usize]| {
            let mut fixed = inst.clone();
            let mut notes = Vec::new();
            for ((field, opts), &k) in options.iter().zip(choice) {
                *fixed.fol_mut(*field) = opts[k].0.clone();
                notes.push(format!("{field}: {}", opts[k].1));
            }
            Candidate {
                premises_fol: fixed.premises_fol,
                conclusion_fol: fixed.conclusion_fol,
                notes,
            }
        };
        let base = vec![0usize; options.len()];
        let mut out = vec![build(&base)];
        'outer: for (i, (_, opts)) in options.iter().enumerate() {
            for k in 1..opts.len() {
                if out.len() >= self.max_candidates {
                    break 'outer;
                }
                let mut choice = base.clone();
                choice[i] = k;
                out.push(build(&choice));
            }
        }
        out
    }
}
