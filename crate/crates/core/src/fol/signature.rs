use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::ast::{Formula, Term};

/// Symbols observed in a set of formulas, with their arities.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub predicates: BTreeMap<String, usize>,
    pub functions: BTreeMap<String, usize>,
    pub constants: BTreeSet<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SymbolRole {
    Predicate,
    Function,
    Constant,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SignatureError {
    #[error("symbol `{symbol}` used with arity {first} and arity {second}")]
    ArityConflict {
        symbol: String,
        first: usize,
        second: usize,
    },
    #[error("symbol `{symbol}` used both as {first:?} and as {second:?}")]
    RoleConflict {
        symbol: String,
        first: SymbolRole,
        second: SymbolRole,
    },
}

impl Signature {
    pub fn is_empty(&self) -> bool {
        self.predicates.is_empty() && self.functions.is_empty() && self.constants.is_empty()
    }

    pub fn role_of(&self, symbol: &str) -> Option<(SymbolRole, usize)> {
        if let Some(&n) = self.predicates.get(symbol) {
            Some((SymbolRole::Predicate, n))
        } else if let Some(&n) = self.functions.get(symbol) {
            Some((SymbolRole::Function, n))
        } else if self.constants.contains(symbol) {
            Some((SymbolRole::Constant, 0))
        } else {
            None
        }
    }

    pub fn contains(&self, symbol: &str) -> bool {
        self.role_of(symbol).is_some()
    }

    /// Every symbol with its role and arity, in name order.
    pub fn symbols(&self) -> Vec<(String, SymbolRole, usize)> {
        let mut all: Vec<_> = self
            .predicates
            .iter()
            .map(|(s, &n)| (s.clone(), SymbolRole::Predicate, n))
            .chain(self.functions.iter().map(|(s, &n)| (s.clone(), SymbolRole::Function, n)))
            .chain(self.constants.iter().map(|s| (s.clone(), SymbolRole::Constant, 0)))
            .collect();
        all.sort();
        all
    }

    pub fn add_symbol(
        &mut self,
        symbol: &str,
        role: SymbolRole,
        arity: usize,
    ) -> Result<(), SignatureError> {
        match self.role_of(symbol) {
            Some((r, n)) if r == role => {
                if n != arity {
                    return Err(SignatureError::ArityConflict {
                        symbol: symbol.to_string(),
                        first: n,
                        second: arity,
                    });
                }
                Ok(())
            }
            Some((r, _)) => Err(SignatureError::RoleConflict {
                symbol: symbol.to_string(),
                first: r,
                second: role,
            }),
            None => {
                match role {
                    SymbolRole::Predicate => {
                        self.predicates.insert(symbol.to_string(), arity);
                    }
                    SymbolRole::Function => {
                        self.functions.insert(symbol.to_string(), arity);
                    }
                    SymbolRole::Constant => {
                        self.constants.insert(symbol.to_string());
                    }
                }
                Ok(())
            }
        }
    }

    fn add_term(&mut self, t: &Term) -> Result<(), SignatureError> {
        match t {
            Term::Var(_) => Ok(()),
            Term::Const(c) => self.add_symbol(c, SymbolRole::Constant, 0),
            Term::App(f, args) => {
                self.add_symbol(f, SymbolRole::Function, args.len())?;
                args.iter().try_for_each(|a| self.add_term(a))
            }
        }
    }

    pub fn add_formula(&mut self, f: &Formula) -> Result<(), SignatureError> {
        let mut result = Ok(());
        f.for_each_atom(&mut |atom| {
            if result.is_err() {
                return;
            }
            result = self
                .add_symbol(&atom.predicate, SymbolRole::Predicate, atom.args.len())
                .and_then(|_| atom.args.iter().try_for_each(|t| self.add_term(t)));
        });
        result
    }
}

/// Collects every predicate, function and constant with its observed arity.
pub fn infer_signature(fs: &[Formula]) -> Result<Signature, SignatureError> {
    let mut sig = Signature::default();
    for f in fs {
        sig.add_formula(f)?;
    }
    Ok(sig)
}
