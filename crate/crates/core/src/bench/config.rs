use serde::{Deserialize, Serialize};

use crate::design::BudgetConfig;
use crate::error::{Error, Result};
use crate::graph::{Dag, InterventionFamily, DEFAULT_MEC_CAP};
use crate::posterior::TargetFunctional;
use crate::sem::{InterventionDist, NoiseModel};

/// Where the ground-truth graph comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GraphSpec {
    /// `0 → 1 → … → p-1` with random weights.
    Chain { p: usize },
    /// Erdős–Rényi skeleton with edge probability `density`, random order.
    Er { p: usize, density: f64 },
    /// A fixed DAG; weights are drawn at random unless given, one per edge in order.
    Explicit {
        p: usize,
        edges: Vec<[usize; 2]>,
        #[serde(default)]
        weights: Option<Vec<f64>>,
    },
}

impl GraphSpec {
    pub fn p(&self) -> usize {
        match *self {
            GraphSpec::Chain { p } | GraphSpec::Er { p, .. } | GraphSpec::Explicit { p, .. } => p,
        }
    }

    pub(crate) fn explicit_dag(&self) -> Option<Result<Dag>> {
        match self {
            GraphSpec::Explicit { p, edges, .. } => {
                let e: Vec<(usize, usize)> = edges.iter().map(|&[a, b]| (a, b)).collect();
                Some(Dag::new(*p, &e))
            }
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Bootstrap ensemble + greedy Monte-Carlo mutual information.
    Abcd,
    Random,
    ChordalRandom,
    /// Greedy on the infinite-sample residual entropy.
    InfiniteSample,
    /// Greedy on the expected number of newly oriented edges.
    Meek,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Abcd => "abcd",
            Strategy::Random => "random",
            Strategy::ChordalRandom => "chordal-random",
            Strategy::InfiniteSample => "infinite-sample",
            Strategy::Meek => "meek",
        }
    }

    pub(crate) fn code(self) -> u64 {
        match self {
            Strategy::Abcd => 1,
            Strategy::Random => 2,
            Strategy::ChordalRandom => 3,
            Strategy::InfiniteSample => 4,
            Strategy::Meek => 5,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LearnerKind {
    /// Exhaustive over all DAGs for p ≤ 5, hill climbing above.
    #[default]
    Auto,
    Exhaustive,
    HillClimb,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetSpec {
    pub total: usize,
    pub batches: usize,
    /// Distinct targets per batch; omitted = unlimited.
    #[serde(default)]
    pub max_unique: Option<usize>,
}

fn default_functional() -> TargetFunctional {
    TargetFunctional::FullGraph
}
fn default_family() -> String {
    "singles".into()
}
fn default_t() -> usize {
    20
}
fn default_m() -> usize {
    30
}
fn default_one() -> usize {
    1
}
fn default_true() -> bool {
    true
}
fn default_n_obs() -> usize {
    500
}
fn default_cap() -> usize {
    100
}

/// A simulation study: ground truth, budget, strategies and estimator sizes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub graph: GraphSpec,
    pub budget: BudgetSpec,
    pub strategies: Vec<Strategy>,
    #[serde(default = "default_functional")]
    pub functional: TargetFunctional,
    /// `singles` or an explicit list such as `{0};{1,2}`.
    #[serde(default = "default_family")]
    pub family: String,
    /// Bootstrap resamples (unknown-class mode).
    #[serde(default = "default_t")]
    pub t: usize,
    /// Synthetic datasets per ensemble member.
    #[serde(default = "default_m")]
    pub m: usize,
    #[serde(default = "default_one")]
    pub replicates: usize,
    #[serde(default)]
    pub seed: u64,
    /// Start from the true Markov equivalence class with a uniform prior
    /// instead of bootstrapping.
    #[serde(default = "default_true")]
    pub known_mec: bool,
    /// Observational rows drawn before the first batch.
    #[serde(default = "default_n_obs")]
    pub n_obs: usize,
    /// Largest equivalence class accepted for random graphs; larger ones are redrawn.
    #[serde(default = "default_cap")]
    pub mec_cap: usize,
    /// Known-class mode only: widen the candidates to the union of the classes
    /// reached by up to this many random reversals of non-covered edges.
    #[serde(default)]
    pub multi_mec_flips: usize,
    #[serde(default)]
    pub noise: NoiseModel,
    #[serde(default)]
    pub learner: LearnerKind,
    #[serde(default)]
    pub intervention: InterventionDist,
}

impl ExperimentConfig {
    pub fn budget(&self) -> Result<BudgetConfig> {
        BudgetConfig::new(self.budget.total, self.budget.batches, self.budget.max_unique)
    }

    pub fn family(&self) -> Result<InterventionFamily> {
        InterventionFamily::parse_spec(&self.family, self.graph.p())
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.graph.p();
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if p < 2 {
            return bad(format!("graph needs p ≥ 2, got {p}"));
        }
        match &self.graph {
            GraphSpec::Er { density, .. } if !(*density > 0.0 && *density <= 1.0) => {
                return bad(format!("density must be in (0, 1], got {density}"));
            }
            GraphSpec::Explicit { edges, weights, .. } => {
                self.graph.explicit_dag().expect("explicit")?;
                if let Some(w) = weights {
                    if w.len() != edges.len() {
                        return bad(format!("{} weights for {} edges", w.len(), edges.len()));
                    }
                }
            }
            _ => {}
        }
        if self.replicates == 0 {
            return bad("replicates must be at least 1".into());
        }
        if self.strategies.is_empty() {
            return bad("at least one strategy is required".into());
        }
        if self.t == 0 || self.m == 0 {
            return bad("t and m must be at least 1".into());
        }
        if self.n_obs <= p {
            return bad(format!("n_obs = {} is too small to fit a {p}-node model", self.n_obs));
        }
        if self.mec_cap == 0 || self.mec_cap > DEFAULT_MEC_CAP {
            return bad(format!("mec_cap must be in 1..={DEFAULT_MEC_CAP}"));
        }
        let budget = self.budget()?;
        let family = self.family()?;
        if let Some(k) = budget.max_unique {
            if k > family.len() {
                return bad(format!("max_unique = {k} exceeds the family size {}", family.len()));
            }
        }
        self.functional.validate(p)?;
        if self.strategies.contains(&Strategy::Meek) && (!self.known_mec || self.multi_mec_flips > 0) {
            return bad("the meek strategy needs known_mec = true and multi_mec_flips = 0".into());
        }
        if let NoiseModel::Known(v) = self.noise {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("known noise variance must be positive, got {v}"));
            }
        }
        if !(self.intervention.variance > 0.0 && self.intervention.variance.is_finite() && self.intervention.mean.is_finite()) {
            return bad("intervention variance must be positive and finite".into());
        }
        if !self.known_mec && p > 5 && self.learner == LearnerKind::Exhaustive {
            return bad("the exhaustive learner enumerates all DAGs and needs p ≤ 5".into());
        }
        Ok(())
    }

    /// Parses TOML, or JSON when the text starts with `{`.
    pub fn from_str_any(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| Error::InvalidConfig(format!("JSON config: {e}")))?
        } else {
            toml::from_str(text).map_err(|e| Error::InvalidConfig(format!("TOML config: {e}")))?
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
