//! Three-way first-order entailment by resolution refutation, dataset
//! verification and repair, and agent assessment over a JSON task protocol.
//!
//! Start with [`fol::parse_formula`] and [`prover::classify_entailment`];
//! the `examples/` directory has one program per capability.

pub mod assessor;
pub mod clausal;
pub mod cli;
pub mod config;
pub mod datapipe;
pub mod fol;
pub mod oracle;
pub mod prover;
pub mod stats;
pub mod transport;
