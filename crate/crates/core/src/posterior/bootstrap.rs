use rand::Rng;

use super::ensemble::DagEnsemble;
use super::learner::DagLearner;
use super::weights::{DagPrior, UniformPrior};
use crate::error::{Error, Result};
use crate::par;
use crate::rng::{self, stream};
use crate::sem::{Dataset, NoiseModel};

/// Retries per resample after the first attempt.
pub const BOOTSTRAP_RETRIES: u64 = 3;

/// DAG bootstrap with estimated noise and a uniform prior.
pub fn dag_bootstrap(data: &Dataset, t: usize, learner: &dyn DagLearner, seed: u64) -> Result<DagEnsemble> {
    dag_bootstrap_with(data, t, learner, seed, NoiseModel::Estimated, &UniformPrior)
}

/// Resamples the rows `t` times with replacement, learns one DAG per
/// resample, then fits and weights every learned DAG on the original data.
/// Resample `k` draws from a stream derived from `(seed, k, attempt)`, so the
/// result does not depend on evaluation order.
pub fn dag_bootstrap_with(
    data: &Dataset,
    t: usize,
    learner: &dyn DagLearner,
    seed: u64,
    noise: NoiseModel,
    prior: &dyn DagPrior,
) -> Result<DagEnsemble> {
    if t == 0 {
        return Err(Error::InvalidConfig("bootstrap needs T ≥ 1".into()));
    }
    if data.is_empty() {
        return Err(Error::InvalidData("bootstrap needs a nonempty dataset".into()));
    }
    // Even the parentless model of a node needs a row that spares it.
    for node in 0..data.p() {
        if data.count_sparing(node) == 0 {
            return Err(Error::InsufficientData { node, have: 0, need: 1 });
        }
    }
    let n = data.n();
    let dags = par::try_map_range(t, |k| {
        let mut last = None;
        for attempt in 0..=BOOTSTRAP_RETRIES {
            let mut rng = rng::rng_from(seed, &[stream::BOOTSTRAP, k as u64, attempt]);
            let idx: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
            match learner.learn(&data.select(&idx)) {
                Ok(g) => return Ok(g),
                Err(e) => last = Some(e),
            }
        }
        let e = last.expect("at least one attempt");
        Err(Error::Learner(format!("resample {k} failed {} times: {e}", BOOTSTRAP_RETRIES + 1)))
    })?;
    DagEnsemble::fit(dags, data, noise, prior)
}
