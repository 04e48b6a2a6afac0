//! Approximate posteriors over DAGs: bootstrap ensembles, empirical-Bayes
//! weights, functionals of the graph and their entropies.

mod bootstrap;
mod ensemble;
mod functional;
mod learner;
mod weights;

pub use bootstrap::{dag_bootstrap, dag_bootstrap_with, BOOTSTRAP_RETRIES};
pub use ensemble::{functional_distribution, reweighted_posterior, DagEnsemble};
pub use functional::{
    entropy, entropy_bits, FunctionalClasses, FunctionalDistribution, FunctionalValue, Orientation, TargetFunctional,
};
pub use learner::{BicScorer, DagLearner, ExhaustiveLearner, HillClimbLearner};
pub(crate) use weights::normalize_into;
pub use weights::{normalize_log_weights, posterior_weights, DagPrior, UniformPrior};
