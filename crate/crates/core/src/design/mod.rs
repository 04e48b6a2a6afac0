//! Design utilities and optimizers: the Monte-Carlo mutual-information
//! utility, the infinite-sample and edge-orientation utilities, greedy and
//! exhaustive batch selection, and baseline strategies.

mod budget;
mod greedy;
mod infinite;
mod mi;
mod strategy;
mod utility;

use serde::Serialize;

pub use budget::{split_evenly, BudgetConfig};
pub use greedy::{brute_force_design, greedy_design, GreedyResult, TraceEntry, BRUTE_FORCE_GUARD};
pub use infinite::{equivalence_groups, residual_entropy, utility_infinite, utility_meek};
pub use mi::{utility_mi_hat, MiState, MiUtility};
pub use strategy::{abcd_round, chordal_random_strategy, infinite_sample_strategy, meek_strategy, random_strategy};
pub use utility::{FnUtility, IncrementalUtility, UtilityEstimate};

use crate::sem::{Dataset, Design};

/// What happened in one batch of an adaptive run.
#[derive(Clone, Debug, Serialize)]
pub struct BatchRecord {
    pub batch: usize,
    pub design: Design,
    pub pre_entropy: f64,
    pub post_entropy: f64,
    #[serde(skip)]
    pub rows: Dataset,
}
