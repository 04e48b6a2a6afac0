use std::collections::HashMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{bit, Dag, MAX_NODES};
use crate::sem::{Dataset, NoiseModel, SufficientStats};

/// A structure learner: data in, one DAG out.
pub trait DagLearner: Sync {
    fn learn(&self, data: &Dataset) -> Result<Dag>;
}

impl<F: Fn(&Dataset) -> Result<Dag> + Sync> DagLearner for F {
    fn learn(&self, data: &Dataset) -> Result<Dag> {
        self(data)
    }
}

/// Decomposable BIC score with a per-(node, parent set) cache.
pub struct BicScorer {
    stats: SufficientStats,
    penalty: f64,
    noise: NoiseModel,
    cache: HashMap<(usize, u64), f64>,
}

impl BicScorer {
    pub fn new(data: &Dataset, noise: NoiseModel) -> Self {
        let n = data.n().max(1) as f64;
        BicScorer { stats: SufficientStats::new(data), penalty: 0.5 * n.ln(), noise, cache: HashMap::new() }
    }

    /// Maximized log-likelihood of `node` given `parents`, minus `(ln n)/2`
    /// per edge weight; `-inf` when the regression cannot be fitted.
    pub fn local(&mut self, node: usize, parents: u64) -> f64 {
        if let Some(&s) = self.cache.get(&(node, parents)) {
            return s;
        }
        let pa: Vec<usize> = crate::graph::iter_bits(parents).collect();
        let s = match self.stats.fit_node(node, &pa) {
            Ok(fit) if fit.rss > 0.0 || matches!(self.noise, NoiseModel::Known(_)) => {
                fit.log_likelihood(self.noise) - self.penalty * pa.len() as f64
            }
            _ => f64::NEG_INFINITY,
        };
        self.cache.insert((node, parents), s);
        s
    }

    pub fn score(&mut self, g: &Dag) -> f64 {
        (0..g.p()).map(|j| self.local(j, g.parents_mask(j))).sum()
    }
}

/// Returns the highest-BIC DAG among a fixed candidate list; ties go to the
/// earliest candidate.
#[derive(Clone, Debug)]
pub struct ExhaustiveLearner {
    candidates: Vec<Dag>,
    noise: NoiseModel,
}

impl ExhaustiveLearner {
    pub fn new(candidates: Vec<Dag>, noise: NoiseModel) -> Result<Self> {
        if candidates.is_empty() {
            return Err(Error::InvalidConfig("exhaustive learner needs at least one candidate".into()));
        }
        Ok(ExhaustiveLearner { candidates, noise })
    }

    pub fn candidates(&self) -> &[Dag] {
        &self.candidates
    }
}

impl DagLearner for ExhaustiveLearner {
    fn learn(&self, data: &Dataset) -> Result<Dag> {
        let mut scorer = BicScorer::new(data, self.noise);
        let mut best: Option<(f64, &Dag)> = None;
        for g in &self.candidates {
            let s = scorer.score(g);
            if s > f64::NEG_INFINITY && best.is_none_or(|(b, _)| s > b) {
                best = Some((s, g));
            }
        }
        best.map(|(_, g)| g.clone()).ok_or_else(|| Error::Learner("no candidate could be scored on this data".into()))
    }
}

/// Greedy BIC hill climbing over single-edge additions, deletions and
/// reversals, starting from the empty graph. Each restart perturbs the best
/// graph so far with a few random edge toggles and climbs again.
#[derive(Clone, Debug)]
pub struct HillClimbLearner {
    pub max_parents: usize,
    pub max_steps: usize,
    pub restarts: usize,
    pub perturbation: usize,
    pub seed: u64,
    pub noise: NoiseModel,
}

impl Default for HillClimbLearner {
    fn default() -> Self {
        HillClimbLearner {
            max_parents: 4,
            max_steps: 10_000,
            restarts: 50,
            perturbation: 4,
            seed: 0,
            noise: NoiseModel::Estimated,
        }
    }
}

/// A node and its replacement parent set.
type Change = (usize, u64);

impl HillClimbLearner {
    fn climb(&self, scorer: &mut BicScorer, parents: &mut [u64]) -> f64 {
        let p = parents.len();
        let mut local: Vec<f64> = (0..p).map(|j| scorer.local(j, parents[j])).collect();
        for _ in 0..self.max_steps {
            // (gain, node, its new parents, optional second (node, parents))
            let mut best: Option<(f64, usize, u64, Option<Change>)> = None;
            let mut consider = |gain: f64, mv: (usize, u64, Option<Change>)| {
                if gain > 1e-9 && best.is_none_or(|b| gain > b.0) {
                    best = Some((gain, mv.0, mv.1, mv.2));
                }
            };
            for i in 0..p {
                for j in 0..p {
                    if i == j {
                        continue;
                    }
                    if parents[j] & bit(i) != 0 {
                        let del = parents[j] & !bit(i);
                        consider(scorer.local(j, del) - local[j], (j, del, None));
                        let add = parents[i] | bit(j);
                        if (parents[i].count_ones() as usize) < self.max_parents && !reaches_after_removal(parents, i, j) {
                            let gain = scorer.local(j, del) - local[j] + scorer.local(i, add) - local[i];
                            consider(gain, (j, del, Some((i, add))));
                        }
                    } else if parents[i] & bit(j) == 0
                        && (parents[j].count_ones() as usize) < self.max_parents
                        && !reaches(parents, j, i)
                    {
                        let add = parents[j] | bit(i);
                        consider(scorer.local(j, add) - local[j], (j, add, None));
                    }
                }
            }
            let Some((_, j, pj, other)) = best else { break };
            parents[j] = pj;
            local[j] = scorer.local(j, pj);
            if let Some((i, pi)) = other {
                parents[i] = pi;
                local[i] = scorer.local(i, pi);
            }
        }
        local.iter().sum()
    }
}

impl DagLearner for HillClimbLearner {
    fn learn(&self, data: &Dataset) -> Result<Dag> {
        let p = data.p();
        if p > MAX_NODES {
            return Err(Error::TooManyNodes { p, max: MAX_NODES });
        }
        let mut scorer = BicScorer::new(data, self.noise);
        if (0..p).any(|j| !scorer.local(j, 0).is_finite()) {
            return Err(Error::Learner("empty graph cannot be scored on this data".into()));
        }
        let mut best = vec![0u64; p];
        let mut best_score = self.climb(&mut scorer, &mut best);
        let mut rng = crate::rng::rng_from(self.seed, &[0x4843]);
        for _ in 0..self.restarts {
            let mut parents = best.clone();
            for _ in 0..self.perturbation {
                let i = rng.random_range(0..p);
                let j = rng.random_range(0..p);
                if i == j {
                    continue;
                }
                if parents[j] & bit(i) != 0 {
                    parents[j] &= !bit(i);
                } else if parents[i] & bit(j) != 0 {
                    if !reaches_after_removal(&parents, j, i) {
                        parents[i] &= !bit(j);
                        parents[j] |= bit(i);
                    }
                } else if !reaches(&parents, j, i) {
                    parents[j] |= bit(i);
                }
            }
            let score = self.climb(&mut scorer, &mut parents);
            if score > best_score + 1e-9 {
                best_score = score;
                best = parents;
            }
        }
        Dag::from_parent_masks(p, best)
    }
}

/// Whether `to` is reachable from `from` along directed edges.
fn reaches(parents: &[u64], from: usize, to: usize) -> bool {
    let p = parents.len();
    let children = |v: usize| (0..p).filter(move |&c| parents[c] & bit(v) != 0);
    let mut seen = bit(from);
    let mut stack = vec![from];
    while let Some(v) = stack.pop() {
        if v == to {
            return true;
        }
        for c in children(v) {
            if seen & bit(c) == 0 {
                seen |= bit(c);
                stack.push(c);
            }
        }
    }
    false
}

/// Whether reversing `i → j` to `j → i` would close a cycle: true iff `i`
/// still reaches `j` once the edge itself is gone.
fn reaches_after_removal(parents: &[u64], i: usize, j: usize) -> bool {
    let mut pruned = parents.to_vec();
    pruned[j] &= !bit(i);
    reaches(&pruned, i, j)
}
