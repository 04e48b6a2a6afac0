//! Budgeted Bayesian experimental design for targeted causal structure discovery.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph`] holds DAG / partially directed graph types, Meek closure, Markov
//!   equivalence class enumeration and interventional essential graphs.
//! * [`sem`] is the linear-Gaussian structural causal model: sampling under
//!   perfect interventions, maximum-likelihood fitting and log-likelihoods.
//! * [`posterior`] approximates the posterior over DAGs with a weighted
//!   ensemble (DAG bootstrap + empirical-Bayes weights) and evaluates target
//!   functionals and their entropies.
//! * [`design`] scores candidate intervention multisets (Monte-Carlo mutual
//!   information, infinite-sample and edge-orientation utilities) and picks
//!   batches greedily under sample and uniqueness budgets.
//! * [`bench`] is the simulation harness: multi-batch active-learning loops
//!   against a ground-truth model, aggregation, and the fixed demo scenarios.
//!
//! Data-parallel loops (candidate evaluation, bootstrap resamples, replicates)
//! go through [`par`], which uses rayon when the `parallel` feature is on and
//! a plain sequential loop otherwise. Results are identical either way.

pub mod bench;
pub mod design;
pub mod error;
pub mod graph;
pub mod par;
pub mod posterior;
pub mod rng;
pub mod sem;

pub use error::{Error, Result};
