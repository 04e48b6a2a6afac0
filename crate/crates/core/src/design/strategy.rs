use rand::seq::index;

use super::budget::{split_evenly, BudgetConfig};
use super::greedy::{greedy_design, GreedyResult};
use super::infinite::{residual_entropy, utility_meek};
use super::mi::MiUtility;
use crate::error::{Error, Result};
use crate::graph::{chordal_nodes, Dag, InterventionFamily, InterventionTarget, Mec, Pdag};
use crate::posterior::{dag_bootstrap, DagLearner, FunctionalClasses, TargetFunctional};
use crate::rng::{self, stream};
use crate::sem::{Dataset, Design};

fn check_k(k: Option<usize>, available: usize) -> Result<usize> {
    match k {
        None => Ok(available),
        Some(0) => Err(Error::InvalidBudget("K must be at least 1".into())),
        Some(k) if k > available => Err(Error::InvalidBudget(format!("K = {k} with only {available} targets"))),
        Some(k) => Ok(k),
    }
}

fn spread(targets: &[InterventionTarget], n_b: usize) -> Design {
    Design::from_counts(targets.iter().copied().zip(split_evenly(n_b, targets.len())))
}

/// `K` distinct family targets drawn uniformly without replacement
/// (`K = |family|` when unlimited), samples split evenly.
pub fn random_strategy(family: &InterventionFamily, n_b: usize, k: Option<usize>, seed: u64) -> Result<Design> {
    random_from(family.targets(), n_b, k, seed)
}

fn random_from(pool: &[InterventionTarget], n_b: usize, k: Option<usize>, seed: u64) -> Result<Design> {
    let k = check_k(k, pool.len())?;
    let mut rng = rng::rng_from(seed, &[stream::RANDOM_DESIGN]);
    let picks: Vec<InterventionTarget> = index::sample(&mut rng, pool.len(), k).into_iter().map(|i| pool[i]).collect();
    Ok(spread(&picks, n_b))
}

/// Like [`random_strategy`] restricted to targets touching a node with an
/// undirected edge in `rep`; falls back to the whole family when there is none.
/// `K` is capped at the number of eligible targets.
pub fn chordal_random_strategy(
    rep: &Pdag,
    family: &InterventionFamily,
    n_b: usize,
    k: Option<usize>,
    seed: u64,
) -> Result<Design> {
    check_k(k, family.len())?;
    let chordal = chordal_nodes(rep);
    let eligible: Vec<InterventionTarget> =
        family.targets().iter().copied().filter(|t| chordal.iter().any(|&c| t.contains(c))).collect();
    if eligible.is_empty() {
        return random_strategy(family, n_b, k, seed);
    }
    let k = k.map(|k| k.min(eligible.len()));
    random_from(&eligible, n_b, k, seed)
}

/// Greedily adds distinct targets minimizing the residual entropy of `f`
/// under infinite data, stopping at `K` targets (at most `n_b` when
/// unlimited) or when no target strictly lowers it. Samples are split evenly.
pub fn infinite_sample_strategy(
    dags: &[Dag],
    weights: &[f64],
    f: TargetFunctional,
    family: &InterventionFamily,
    n_b: usize,
    k: Option<usize>,
) -> Result<Design> {
    let classes = FunctionalClasses::new(dags, f);
    let score = |chosen: &[InterventionTarget]| -residual_entropy(dags, weights, &classes, chosen);
    let chosen = greedy_targets(family, n_b, k, score)?;
    Ok(spread(&chosen, n_b))
}

/// Greedy distinct-target selection maximizing the expected number of
/// newly oriented edges; same stopping rule as [`infinite_sample_strategy`].
pub fn meek_strategy(
    mec: &Mec,
    posterior: &[f64],
    family: &InterventionFamily,
    n_b: usize,
    k: Option<usize>,
) -> Result<Design> {
    utility_meek(mec, posterior, &[])?;
    let score = |chosen: &[InterventionTarget]| utility_meek(mec, posterior, chosen).expect("validated shapes");
    let chosen = greedy_targets(family, n_b, k, score)?;
    Ok(spread(&chosen, n_b))
}

/// Relative gap below which two scores count as tied. Symmetric candidates
/// under an exactly uniform posterior otherwise get ordered by rounding.
const SCORE_TIE: f64 = 1e-9;

fn greedy_targets<F: Fn(&[InterventionTarget]) -> f64>(
    family: &InterventionFamily,
    n_b: usize,
    k: Option<usize>,
    score: F,
) -> Result<Vec<InterventionTarget>> {
    if n_b == 0 {
        return Err(Error::InvalidBudget("batch size must be at least 1".into()));
    }
    let steps = check_k(k, family.len())?.min(n_b);
    let mut chosen: Vec<InterventionTarget> = Vec::new();
    let mut current = score(&chosen);
    for _ in 0..steps {
        let mut best: Option<(f64, InterventionTarget)> = None;
        for &t in family.targets() {
            if chosen.contains(&t) {
                continue;
            }
            chosen.push(t);
            let s = score(&chosen);
            chosen.pop();
            if best.is_none_or(|(b, _)| s > b + SCORE_TIE * b.abs().max(1.0)) {
                best = Some((s, t));
            }
        }
        let Some((s, t)) = best else { break };
        if !chosen.is_empty() && s <= current + SCORE_TIE * current.abs().max(1.0) {
            break;
        }
        chosen.push(t);
        current = s;
    }
    Ok(chosen)
}

/// One round of the adaptive strategy: bootstrap an ensemble from `data`,
/// then greedily maximize the Monte-Carlo mutual information.
#[allow(clippy::too_many_arguments)]
pub fn abcd_round(
    f: TargetFunctional,
    data: &Dataset,
    family: &InterventionFamily,
    budget: &BudgetConfig,
    t: usize,
    m: usize,
    learner: &dyn DagLearner,
    seed: u64,
) -> Result<GreedyResult> {
    let ens = dag_bootstrap(data, t, learner, rng::derive_seed(seed, &[stream::BOOTSTRAP]))?;
    let u = MiUtility::new(&ens, f, m, seed);
    greedy_design(&u, budget.per_batch, family, budget.max_unique)
}
