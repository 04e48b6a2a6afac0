use serde::{Deserialize, Serialize};

use crate::graph::InterventionTarget;
use crate::sem::Design;

/// A utility value with its Monte-Carlo standard error (zero when exact).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UtilityEstimate {
    pub value: f64,
    pub std_error: f64,
    /// Synthetic datasets per ensemble member.
    pub m: usize,
    /// Ensemble size.
    pub t: usize,
}

impl UtilityEstimate {
    pub fn exact(value: f64) -> Self {
        UtilityEstimate { value, std_error: 0.0, m: 0, t: 0 }
    }
}

/// A design utility evaluated incrementally: designs are built by adding
/// samples to a state, and the state is scored.
pub trait IncrementalUtility: Sync {
    type State: Clone + Send + Sync;

    fn empty(&self) -> Self::State;

    fn add(&self, state: &mut Self::State, target: InterventionTarget, count: usize);

    fn score(&self, state: &Self::State) -> UtilityEstimate;

    fn evaluate(&self, design: &Design) -> UtilityEstimate {
        let mut state = self.empty();
        for (t, c) in design.iter() {
            self.add(&mut state, t, c);
        }
        self.score(&state)
    }
}

/// Adapts a plain function of the design.
pub struct FnUtility<F>(pub F);

impl<F: Fn(&Design) -> UtilityEstimate + Sync> IncrementalUtility for FnUtility<F> {
    type State = Design;

    fn empty(&self) -> Design {
        Design::new()
    }

    fn add(&self, state: &mut Design, target: InterventionTarget, count: usize) {
        state.add(target, count);
    }

    fn score(&self, state: &Design) -> UtilityEstimate {
        (self.0)(state)
    }
}
