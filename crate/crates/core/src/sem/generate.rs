use rand::seq::SliceRandom;
use rand::Rng;

use super::LinearGaussianScm;
use crate::error::{Error, Result};
use crate::graph::Dag;
use crate::rng;

/// Edge-weight magnitudes are drawn uniformly from this range, with a random sign.
pub const WEIGHT_RANGE: (f64, f64) = (0.25, 1.0);

pub fn random_weight<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let magnitude = rng.random_range(WEIGHT_RANGE.0..=WEIGHT_RANGE.1);
    if rng.random::<bool>() {
        magnitude
    } else {
        -magnitude
    }
}

fn with_random_weights(dag: Dag, seed: u64) -> Result<LinearGaussianScm> {
    let p = dag.p();
    let mut rng = rng::rng_from(seed, &[0x5747]);
    let mut weights = vec![0.0; p * p];
    for (i, j) in dag.edges() {
        weights[i * p + j] = random_weight(&mut rng);
    }
    LinearGaussianScm::new(dag, weights, vec![1.0; p])
}

/// The chain `0 → 1 → … → p-1` with random weights and unit noise.
pub fn chain_scm(p: usize, seed: u64) -> Result<LinearGaussianScm> {
    if p < 2 {
        return Err(Error::InvalidConfig(format!("chain needs p ≥ 2, got {p}")));
    }
    let edges: Vec<_> = (0..p - 1).map(|i| (i, i + 1)).collect();
    with_random_weights(Dag::new(p, &edges)?, seed)
}

/// Erdős–Rényi skeleton with edge probability `density`, oriented along a
/// uniformly random node permutation; random weights and unit noise.
pub fn er_scm(p: usize, density: f64, seed: u64) -> Result<LinearGaussianScm> {
    if p < 2 {
        return Err(Error::InvalidConfig(format!("ER graph needs p ≥ 2, got {p}")));
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::InvalidConfig(format!("density must be in (0, 1], got {density}")));
    }
    let mut rng = rng::rng_from(seed, &[0xE2]);
    let mut order: Vec<usize> = (0..p).collect();
    order.shuffle(&mut rng);
    let mut edges = Vec::new();
    for a in 0..p {
        for b in a + 1..p {
            if rng.random::<f64>() < density {
                edges.push((order[a], order[b]));
            }
        }
    }
    with_random_weights(Dag::new(p, &edges)?, seed)
}
