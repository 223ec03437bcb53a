//! Simulation and verification of the high-girth triple process.
//!
//! The process starts from the empty 3-uniform hypergraph on `n` vertices and
//! repeatedly adds a uniformly random *available* triple: one that keeps the
//! hypergraph a partial Steiner triple system in which no `g` vertices
//! (`4 <= g <= ell`) span `g - 2` or more triples. It stops when no triple is
//! available.
//!
//! * [`catalog`] enumerates the minimal forbidden configurations.
//! * [`engine`] runs the process with O(1) uniform sampling.
//! * [`trajectories`] evaluates the closed-form predictions.
//! * [`observables`] measures the live state and provides girth oracles.
//! * [`experiments`] runs trials, sweeps and reports.

pub mod catalog;
pub mod engine;
pub mod error;
pub mod experiments;
pub mod hypergraph;
pub mod observables;
pub mod trajectories;

pub(crate) mod embed;

pub use catalog::{enumerate_obstructions, is_minimal, Obstruction, ObstructionCatalog};
pub use engine::{ProcessState, StepOutcome};
pub use error::{Error, Result};
pub use experiments::{run_trial, run_trials, RunConfig, RunRecord, SweepReport};
pub use hypergraph::{SmallHypergraph, Triple, TripleCode};
