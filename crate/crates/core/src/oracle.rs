//! Brute-force ground-model enumeration over a finite, function-free
//! universe. Test-side reference for the clausifier and the prover; it
//! shares no code with either.
//!
//! Formulas are grounded to a propositional DAG over the universe and
//! evaluated 64 interpretations at a time.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::fol::{Formula, Label, Term};

/// Largest number of ground atoms the enumerator accepts (2^24 models).
pub const MAX_GROUND_ATOMS: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("{atoms} ground atoms exceed the enumeration limit of {limit}")]
    UniverseTooLarge { atoms: usize, limit: usize },
    #[error("function symbol `{0}` is outside the oracle fragment")]
    FunctionSymbol(String),
    #[error("symbol `{0}` is not part of the universe")]
    UnknownSymbol(String),
    #[error("predicate `{predicate}` used with arity {found}, universe says {expected}")]
    ArityMismatch {
        predicate: String,
        expected: usize,
        found: usize,
    },
    #[error("the universe has no elements")]
    EmptyUniverse,
    #[error("variable `{0}` is not bound by a quantifier")]
    FreeVariable(String),
}

/// Finite domain: every constant names its own element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundUniverse {
    pub constants: Vec<String>,
    pub predicates: BTreeMap<String, usize>,
}

impl GroundUniverse {
    pub fn new(constants: &[&str], predicates: &[(&str, usize)]) -> Self {
        GroundUniverse {
            constants: constants.iter().map(|s| s.to_string()).collect(),
            predicates: predicates.iter().map(|(p, n)| (p.to_string(), *n)).collect(),
        }
    }

    /// Universe of the constants and predicates in `fs`, plus `witnesses`
    /// fresh unnamed elements. At least one element is always present.
    pub fn from_formulas(fs: &[Formula], witnesses: usize) -> Result<Self, OracleError> {
        let mut constants = BTreeSet::new();
        let mut predicates = BTreeMap::new();
        for f in fs {
            let mut err = None;
            f.for_each_atom(&mut |a| {
                match predicates.get(&a.predicate) {
                    Some(&n) if n != a.args.len() => {
                        err.get_or_insert(OracleError::ArityMismatch {
                            predicate: a.predicate.clone(),
                            expected: n,
                            found: a.args.len(),
                        });
                    }
                    _ => {
                        predicates.insert(a.predicate.clone(), a.args.len());
                    }
                }
                for t in &a.args {
                    match t {
                        Term::Const(c) => {
                            constants.insert(c.clone());
                        }
                        Term::App(g, _) => {
                            err.get_or_insert(OracleError::FunctionSymbol(g.clone()));
                        }
                        Term::Var(_) => {}
                    }
                }
            });
            if let Some(e) = err {
                return Err(e);
            }
        }
        let mut constants: Vec<String> = constants.into_iter().collect();
        for i in 0..witnesses {
            constants.push(format!("#w{i}"));
        }
        if constants.is_empty() {
            constants.push("#w0".to_string());
        }
        Ok(GroundUniverse { constants, predicates })
    }

    pub fn ground_atom_count(&self) -> usize {
        self.predicates
            .values()
            .map(|&n| self.constants.len().saturating_pow(n as u32))
            .fold(0usize, usize::saturating_add)
    }
}

/// Existential witnesses needed by `f` when asserted with the given
/// polarity: positive ∃ and negative ∀ each need one.
pub fn witness_count(f: &Formula, positive: bool) -> usize {
    match f {
        Formula::Atom(_) => 0,
        Formula::Not(g) => witness_count(g, !positive),
        Formula::And(gs) | Formula::Or(gs) => gs.iter().map(|g| witness_count(g, positive)).sum(),
        Formula::Implies(a, b) => witness_count(a, !positive) + witness_count(b, positive),
        Formula::Iff(a, b) | Formula::Xor(a, b) => {
            witness_count(a, true) + witness_count(a, false) + witness_count(b, true) + witness_count(b, false)
        }
        Formula::Forall(_, g) => usize::from(!positive) + witness_count(g, positive),
        Formula::Exists(_, g) => usize::from(positive) + witness_count(g, positive),
    }
}

/// True when no existential (in effective polarity) sits inside the
/// scope of a universal, so a finite universe is exact.
pub fn in_oracle_fragment(f: &Formula) -> bool {
    fn go(f: &Formula, positive: bool, under_forall: bool) -> bool {
        match f {
            Formula::Atom(_) => true,
            Formula::Not(g) => go(g, !positive, under_forall),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().all(|g| go(g, positive, under_forall)),
            Formula::Implies(a, b) => go(a, !positive, under_forall) && go(b, positive, under_forall),
            Formula::Iff(a, b) | Formula::Xor(a, b) => [true, false]
                .iter()
                .all(|&p| go(a, p, under_forall) && go(b, p, under_forall)),
            Formula::Forall(_, g) | Formula::Exists(_, g) => {
                let universal = matches!(f, Formula::Forall(..)) == positive;
                if !universal && under_forall {
                    return false;
                }
                go(g, positive, under_forall || universal)
            }
        }
    }
    go(f, true, false)
}

#[derive(Debug)]
enum Ground {
    Lit(usize),
    Const(bool),
    Not(Box<Ground>),
    And(Vec<Ground>),
    Or(Vec<Ground>),
    Iff(Box<Ground>, Box<Ground>),
    Xor(Box<Ground>, Box<Ground>),
}

struct Grounder<'u> {
    universe: &'u GroundUniverse,
    index: BTreeMap<&'u str, usize>,
    offsets: BTreeMap<&'u str, usize>,
}

impl<'u> Grounder<'u> {
    fn new(universe: &'u GroundUniverse) -> Self {
        let index = universe
            .constants
            .iter()
            .enumerate()
            .map(|(i, c)| (c.as_str(), i))
            .collect();
        let mut offsets = BTreeMap::new();
        let mut next = 0;
        for (p, &n) in &universe.predicates {
            offsets.insert(p.as_str(), next);
            next += universe.constants.len().pow(n as u32);
        }
        Grounder {
            universe,
            index,
            offsets,
        }
    }

    fn element(&self, t: &Term, env: &[(String, usize)]) -> Result<usize, OracleError> {
        match t {
            Term::Var(v) => env
                .iter()
                .rev()
                .find(|(n, _)| n == v)
                .map(|&(_, e)| e)
                .ok_or_else(|| OracleError::FreeVariable(v.clone())),
            Term::Const(c) => self
                .index
                .get(c.as_str())
                .copied()
                .ok_or_else(|| OracleError::UnknownSymbol(c.clone())),
            Term::App(f, _) => Err(OracleError::FunctionSymbol(f.clone())),
        }
    }

    fn ground(&self, f: &Formula, env: &mut Vec<(String, usize)>) -> Result<Ground, OracleError> {
        Ok(match f {
            Formula::Atom(a) => {
                let arity = *self
                    .universe
                    .predicates
                    .get(&a.predicate)
                    .ok_or_else(|| OracleError::UnknownSymbol(a.predicate.clone()))?;
                if arity != a.args.len() {
                    return Err(OracleError::ArityMismatch {
                        predicate: a.predicate.clone(),
                        expected: arity,
                        found: a.args.len(),
                    });
                }
                let n = self.universe.constants.len();
                let mut slot = 0;
                for t in &a.args {
                    slot = slot * n + self.element(t, env)?;
                }
                Ground::Lit(self.offsets[a.predicate.as_str()] + slot)
            }
            Formula::Not(g) => Ground::Not(Box::new(self.ground(g, env)?)),
            Formula::And(gs) => Ground::And(gs.iter().map(|g| self.ground(g, env)).collect::<Result<_, _>>()?),
            Formula::Or(gs) => Ground::Or(gs.iter().map(|g| self.ground(g, env)).collect::<Result<_, _>>()?),
            Formula::Implies(a, b) => Ground::Or(vec![
                Ground::Not(Box::new(self.ground(a, env)?)),
                self.ground(b, env)?,
            ]),
            Formula::Iff(a, b) => Ground::Iff(Box::new(self.ground(a, env)?), Box::new(self.ground(b, env)?)),
            Formula::Xor(a, b) => Ground::Xor(Box::new(self.ground(a, env)?), Box::new(self.ground(b, env)?)),
            Formula::Forall(v, g) | Formula::Exists(v, g) => {
                let mut parts = Vec::with_capacity(self.universe.constants.len());
                for e in 0..self.universe.constants.len() {
                    env.push((v.clone(), e));
                    let part = self.ground(g, env);
                    env.pop();
                    parts.push(part?);
                }
                if matches!(f, Formula::Forall(..)) {
                    Ground::And(parts)
                } else {
                    Ground::Or(parts)
                }
            }
        })
    }
}

impl Ground {
    /// Truth values across 64 interpretations at once.
    fn eval(&self, atoms: &[u64]) -> u64 {
        match self {
            Ground::Lit(i) => atoms[*i],
            Ground::Const(b) => {
                if *b {
                    !0
                } else {
                    0
                }
            }
            Ground::Not(g) => !g.eval(atoms),
            Ground::And(gs) => {
                let mut acc = !0u64;
                for g in gs {
                    acc &= g.eval(atoms);
                    if acc == 0 {
                        break;
                    }
                }
                acc
            }
            Ground::Or(gs) => {
                let mut acc = 0u64;
                for g in gs {
                    acc |= g.eval(atoms);
                    if acc == !0 {
                        break;
                    }
                }
                acc
            }
            Ground::Iff(a, b) => !(a.eval(atoms) ^ b.eval(atoms)),
            Ground::Xor(a, b) => a.eval(atoms) ^ b.eval(atoms),
        }
    }
}

const LOW_PATTERNS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

/// Whether some interpretation over `u` satisfies every formula in `fs`.
pub fn enumerate_satisfiable(fs: &[Formula], u: &GroundUniverse) -> Result<bool, OracleError> {
    if u.constants.is_empty() {
        return Err(OracleError::EmptyUniverse);
    }
    let atoms = u.ground_atom_count();
    if atoms > MAX_GROUND_ATOMS {
        return Err(OracleError::UniverseTooLarge {
            atoms,
            limit: MAX_GROUND_ATOMS,
        });
    }
    let grounder = Grounder::new(u);
    let mut env = Vec::new();
    let conj = Ground::And(
        fs.iter()
            .map(|f| grounder.ground(f, &mut env))
            .collect::<Result<Vec<_>, _>>()?,
    );
    let conj = if fs.is_empty() { Ground::Const(true) } else { conj };

    let low = atoms.min(6);
    let valid = if atoms >= 6 { !0u64 } else { (1u64 << (1usize << atoms)) - 1 };
    let mut values = vec![0u64; atoms];
    values[..low].copy_from_slice(&LOW_PATTERNS[..low]);
    let blocks: u64 = 1 << atoms.saturating_sub(6);
    for block in 0..blocks {
        for (i, v) in values.iter_mut().enumerate().skip(6) {
            *v = if (block >> (i - 6)) & 1 == 1 { !0 } else { 0 };
        }
        if conj.eval(&values) & valid != 0 {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Oracle universe for an entailment question: every constant in use plus
/// enough fresh elements to witness the existentials of both checks.
pub fn entailment_universe(premises: &[Formula], conclusion: &Formula) -> Result<GroundUniverse, OracleError> {
    let from_premises: usize = premises.iter().map(|p| witness_count(p, true)).sum();
    let from_conclusion = witness_count(conclusion, true).max(witness_count(conclusion, false));
    let mut all = premises.to_vec();
    all.push(conclusion.clone());
    GroundUniverse::from_formulas(&all, from_premises + from_conclusion)
}

/// Three-way label by exhaustive enumeration, with the same priority rule
/// as the prover: `True` if premises ∧ ¬c has no model, else `False` if
/// premises ∧ c has none, else `Uncertain`.
pub fn oracle_classify(premises: &[Formula], conclusion: &Formula, u: &GroundUniverse) -> Result<Label, OracleError> {
    let mut with_negation = premises.to_vec();
    with_negation.push(Formula::not(conclusion.clone()));
    if !enumerate_satisfiable(&with_negation, u)? {
        return Ok(Label::True);
    }
    let mut with_conclusion = premises.to_vec();
    with_conclusion.push(conclusion.clone());
    if !enumerate_satisfiable(&with_conclusion, u)? {
        return Ok(Label::False);
    }
    Ok(Label::Uncertain)
}

/// Shape limits for [`random_instance`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenConfig {
    pub max_constants: usize,
    pub max_predicates: usize,
    pub max_arity: usize,
    pub max_depth: usize,
    pub max_premises: usize,
    /// Rejection threshold on the oracle universe's ground atom count.
    pub max_ground_atoms: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            max_constants: 3,
            max_predicates: 3,
            max_arity: 2,
            max_depth: 4,
            max_premises: 4,
            max_ground_atoms: 18,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomInstance {
    pub premises: Vec<Formula>,
    pub conclusion: Formula,
}

struct Gen<'a, R: Rng> {
    rng: &'a mut R,
    constants: Vec<String>,
    predicates: Vec<(String, usize)>,
}

impl<R: Rng> Gen<'_, R> {
    fn term(&mut self, vars: &[String]) -> Term {
        let n = vars.len() + self.constants.len();
        let k = self.rng.gen_range(0..n);
        if k < vars.len() {
            Term::var(vars[k].clone())
        } else {
            Term::constant(self.constants[k - vars.len()].clone())
        }
    }

    fn atom(&mut self, vars: &[String]) -> Formula {
        let (p, n) = self.predicates.choose(self.rng).cloned().expect("at least one predicate");
        let args = (0..n).map(|_| self.term(vars)).collect();
        Formula::atom(p, args)
    }

    fn body(&mut self, depth: usize, vars: &[String]) -> Formula {
        if depth <= 1 || self.rng.gen_bool(0.3) {
            let a = self.atom(vars);
            return if self.rng.gen_bool(0.3) { Formula::not(a) } else { a };
        }
        let d = depth - 1;
        match self.rng.gen_range(0..6) {
            0 => Formula::not(self.body(d, vars)),
            1 => Formula::And(vec![self.body(d, vars), self.body(d, vars)]),
            2 => Formula::Or(vec![self.body(d, vars), self.body(d, vars)]),
            3 => Formula::implies(self.body(d, vars), self.body(d, vars)),
            4 => Formula::iff(self.body(d, vars), self.body(d, vars)),
            _ => Formula::xor(self.body(d, vars), self.body(d, vars)),
        }
    }

    /// A quantifier prefix of one kind over a quantifier-free body.
    fn sentence(&mut self, max_depth: usize) -> Formula {
        let (universal, count) = match self.rng.gen_range(0..10) {
            0..=3 => (true, 0),
            4..=5 => (true, 1),
            6 => (true, 2),
            7..=8 => (false, 1),
            _ => (false, 2),
        };
        let vars: Vec<String> = ["x", "y"][..count].iter().map(|s| s.to_string()).collect();
        let body_depth = max_depth.saturating_sub(count).max(1);
        let mut f = self.body(body_depth, &vars);
        for v in vars.iter().rev() {
            f = if universal {
                Formula::forall(v.clone(), f)
            } else {
                Formula::exists(v.clone(), f)
            };
        }
        f
    }
}

/// Draws a random function-free entailment question inside the oracle
/// fragment, resampling until its universe fits `cfg.max_ground_atoms`.
pub fn random_instance<R: Rng>(rng: &mut R, cfg: &GenConfig) -> RandomInstance {
    loop {
        let nc = rng.gen_range(1..=cfg.max_constants);
        let np = rng.gen_range(1..=cfg.max_predicates);
        let constants = ["a", "b", "c", "d", "e"][..nc.min(5)].iter().map(|s| s.to_string()).collect();
        let predicates = ["P", "Q", "R", "S", "T"][..np.min(5)]
            .iter()
            .map(|p| (p.to_string(), rng.gen_range(0..=cfg.max_arity)))
            .collect();
        let mut g = Gen {
            rng: &mut *rng,
            constants,
            predicates,
        };
        let count = g.rng.gen_range(1..=cfg.max_premises);
        let premises: Vec<Formula> = (0..count).map(|_| g.sentence(cfg.max_depth)).collect();
        let conclusion = match g.rng.gen_range(0..10) {
            0 => premises[g.rng.gen_range(0..premises.len())].clone(),
            1 => Formula::not(premises[g.rng.gen_range(0..premises.len())].clone()),
            _ => g.sentence(cfg.max_depth.min(3)),
        };
        let fits = entailment_universe(&premises, &conclusion)
            .map(|u| u.ground_atom_count() <= cfg.max_ground_atoms)
            .unwrap_or(false);
        if fits {
            return RandomInstance { premises, conclusion };
        }
    }
}
