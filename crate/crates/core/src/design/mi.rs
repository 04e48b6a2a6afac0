use super::utility::{IncrementalUtility, UtilityEstimate};
use crate::graph::InterventionTarget;
use crate::par;
use crate::posterior::{normalize_into, DagEnsemble, FunctionalClasses, TargetFunctional};
use crate::rng::{self, stream};
use crate::sem::{CompiledModel, Design, InterventionDist};

/// Monte-Carlo mutual-information utility of a design.
///
/// For every ensemble member `t` with positive weight and replicate `m`, a
/// synthetic dataset is drawn from `(G_t, θ̂_t)` under the design; the
/// ensemble is reweighted by its likelihood and the functional's entropy
/// drop is averaged with outer weights `w_t` and `1/M`.
///
/// Sample `k` of target `I` for `(t, m)` always comes from the same stream,
/// so designs sharing samples share synthetic rows (common random numbers)
/// and the estimate is a deterministic function of the design.
pub struct MiUtility {
    models: Vec<CompiledModel>,
    log_w: Vec<f64>,
    weights: Vec<f64>,
    classes: FunctionalClasses,
    /// Members with positive weight: the outer sum and the reweighting only
    /// involve these.
    active: Vec<usize>,
    h1: f64,
    m: usize,
    seed: u64,
}

/// Accumulated synthetic log-likelihoods: `ll[(a * M + m) * A + s]` is the
/// log-likelihood under active member `s` of the rows drawn from active
/// member `a` in replicate `m`.
#[derive(Clone, Debug)]
pub struct MiState {
    design: Design,
    ll: Vec<f64>,
}

impl MiState {
    pub fn design(&self) -> &Design {
        &self.design
    }
}

impl MiUtility {
    pub fn new(ens: &DagEnsemble, f: TargetFunctional, m: usize, seed: u64) -> Self {
        Self::with_intervention(ens, f, m, seed, InterventionDist::default())
    }

    pub fn with_intervention(
        ens: &DagEnsemble,
        f: TargetFunctional,
        m: usize,
        seed: u64,
        intervention: InterventionDist,
    ) -> Self {
        let m = m.max(1);
        let active: Vec<usize> = (0..ens.len()).filter(|&t| ens.weights()[t] > 0.0).collect();
        let classes = FunctionalClasses::new(ens.dags(), f);
        let h1 = classes.entropy(ens.weights());
        let models = ens.compiled(intervention);
        MiUtility {
            models: active.iter().map(|&t| models[t].clone()).collect(),
            log_w: active.iter().map(|&t| ens.weights()[t].ln()).collect(),
            weights: active.iter().map(|&t| ens.weights()[t]).collect(),
            classes: FunctionalClasses {
                class: active.iter().map(|&t| classes.class[t]).collect(),
                values: classes.values,
            },
            active,
            h1,
            m,
            seed,
        }
    }

    /// Entropy of the functional under the current weights.
    pub fn prior_entropy(&self) -> f64 {
        self.h1
    }

    /// Row likelihood evaluations needed to add one sample.
    pub fn evaluations_per_sample(&self) -> usize {
        self.active.len() * self.active.len() * self.m
    }
}

impl IncrementalUtility for MiUtility {
    type State = MiState;

    fn empty(&self) -> MiState {
        let a = self.active.len();
        MiState { design: Design::new(), ll: vec![0.0; a * self.m * a] }
    }

    fn add(&self, state: &mut MiState, target: InterventionTarget, count: usize) {
        if count == 0 {
            return;
        }
        let a_len = self.active.len();
        let first = state.design.count(target);
        let m_len = self.m;
        let p = self.models.first().map_or(0, |m| m.p());
        par::for_each_chunk_mut(&mut state.ll, a_len, |pair, acc| {
            let (a, m) = (pair / m_len, pair % m_len);
            let t = self.active[a] as u64;
            let mut row = vec![0.0; p];
            for k in first..first + count {
                let mut rng = rng::rng_from(self.seed, &[stream::SYNTHETIC, target.bits(), k as u64, t, m as u64]);
                self.models[a].sample_row(target, &mut rng, &mut row);
                for (s, model) in self.models.iter().enumerate() {
                    acc[s] += model.row_log_likelihood(&row, target);
                }
            }
        });
        state.design.add(target, count);
    }

    fn score(&self, state: &MiState) -> UtilityEstimate {
        let a_len = self.active.len();
        let m_len = self.m;
        let mut value = 0.0;
        let mut var = 0.0;
        let mut log_post = vec![0.0; a_len];
        let mut post = vec![0.0; a_len];
        for a in 0..a_len {
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for m in 0..m_len {
                let acc = &state.ll[(a * m_len + m) * a_len..][..a_len];
                for s in 0..a_len {
                    log_post[s] = self.log_w[s] + acc[s];
                }
                normalize_into(&log_post, &mut post);
                let gain = self.h1 - self.classes.entropy(&post);
                sum += gain;
                sum_sq += gain * gain;
            }
            let mean = sum / m_len as f64;
            value += self.weights[a] * mean;
            if m_len > 1 {
                let s2 = ((sum_sq - m_len as f64 * mean * mean) / (m_len as f64 - 1.0)).max(0.0);
                var += self.weights[a] * self.weights[a] * s2 / m_len as f64;
            }
        }
        UtilityEstimate { value, std_error: var.sqrt(), m: m_len, t: a_len }
    }
}

/// One-shot estimate of the mutual-information utility of `xi`.
pub fn utility_mi_hat(ens: &DagEnsemble, f: TargetFunctional, xi: &Design, m: usize, seed: u64) -> UtilityEstimate {
    MiUtility::new(ens, f, m, seed).evaluate(xi)
}
