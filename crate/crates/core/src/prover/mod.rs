//! Resolution prover, three-way entailment, proof replay and the TPTP bridge.

mod entail;
mod refute;
mod replay;
pub mod tptp;
mod unify;

pub use entail::{classify_entailment, Consistency, EntailError, EntailmentResult};
pub use refute::{
    is_variant, refute, subsumes, Budget, BudgetError, Limit, Outcome, ProofStep, SolverStats, SolverVerdict,
};
pub use replay::{verify_derivation, ReplayError};
pub use tptp::{export_tptp, parse_szs, ExternalProver, SzsStatus, TptpError};
pub use unify::{unify, unify_atoms, unify_atoms_with, Substitution};
