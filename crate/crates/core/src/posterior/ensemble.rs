use serde::{Deserialize, Serialize};

use super::functional::{FunctionalClasses, FunctionalDistribution, TargetFunctional};
use super::weights::{normalize_log_weights, posterior_weights, DagPrior};
use crate::error::{Error, Result};
use crate::graph::Dag;
use crate::par;
use crate::sem::{log_likelihood, mle_fit_stats, CompiledModel, Dataset, Design, InterventionDist, MleParams, NoiseModel, SufficientStats};

/// Weighted candidate DAGs with per-DAG fitted parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct DagEnsemble {
    dags: Vec<Dag>,
    weights: Vec<f64>,
    params: Vec<MleParams>,
}

impl DagEnsemble {
    pub fn new(dags: Vec<Dag>, weights: Vec<f64>, params: Vec<MleParams>) -> Result<Self> {
        if dags.is_empty() {
            return Err(Error::InvalidConfig("ensemble needs at least one DAG".into()));
        }
        if weights.len() != dags.len() || params.len() != dags.len() {
            return Err(Error::InvalidConfig(format!(
                "ensemble lengths differ: {} DAGs, {} weights, {} parameter sets",
                dags.len(),
                weights.len(),
                params.len()
            )));
        }
        if weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
            return Err(Error::InvalidConfig("ensemble weights must be finite and nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConfig(format!("ensemble weights sum to {total}")));
        }
        for (t, (g, th)) in dags.iter().zip(&params).enumerate() {
            let p = g.p();
            if th.noise_variances.len() != p || th.weights.len() != p * p {
                return Err(Error::InvalidConfig(format!("parameter set {t} has the wrong shape")));
            }
            for i in 0..p {
                for j in 0..p {
                    if !g.has_edge(i, j) && th.weights[i * p + j] != 0.0 {
                        return Err(Error::InvalidConfig(format!("parameter set {t} has weight on missing edge {i}->{j}")));
                    }
                }
            }
        }
        Ok(DagEnsemble { dags, weights, params })
    }

    /// Fits every DAG on `data` and weights them by the empirical-Bayes posterior.
    pub fn fit(dags: Vec<Dag>, data: &Dataset, noise: NoiseModel, prior: &dyn DagPrior) -> Result<Self> {
        let stats = SufficientStats::new(data);
        let params = par::map(&dags, |g| mle_fit_stats(g, &stats, noise)).into_iter().collect::<Result<Vec<_>>>()?;
        let weights = posterior_weights(&dags, &params, data, prior)?;
        DagEnsemble::new(dags, weights, params)
    }

    pub fn len(&self) -> usize {
        self.dags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dags.is_empty()
    }

    pub fn p(&self) -> usize {
        self.dags[0].p()
    }

    pub fn dags(&self) -> &[Dag] {
        &self.dags
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn params(&self) -> &[MleParams] {
        &self.params
    }

    pub fn with_weights(&self, weights: Vec<f64>) -> Result<Self> {
        DagEnsemble::new(self.dags.clone(), weights, self.params.clone())
    }

    pub fn compiled(&self, intervention: InterventionDist) -> Vec<CompiledModel> {
        self.dags.iter().zip(&self.params).map(|(g, th)| th.compile(g, intervention)).collect()
    }

    /// Total weight on DAGs equal to `g`.
    pub fn mass_on(&self, g: &Dag) -> f64 {
        self.dags.iter().zip(&self.weights).filter(|(d, _)| *d == g).map(|(_, w)| w).sum()
    }

    pub fn functional_distribution(&self, f: TargetFunctional) -> FunctionalDistribution {
        functional_distribution(self, f)
    }

    pub fn to_json(&self) -> Result<String> {
        let records: Vec<EnsembleRecord> = self
            .dags
            .iter()
            .zip(&self.weights)
            .zip(&self.params)
            .map(|((g, &w), th)| EnsembleRecord {
                dag: g.clone(),
                log_weight: w.ln(),
                weights: th.weights.chunks(g.p()).map(|r| r.to_vec()).collect(),
                noise_variances: th.noise_variances.clone(),
            })
            .collect();
        Ok(serde_json::to_string_pretty(&records)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let records: Vec<EnsembleRecord> = serde_json::from_str(text)?;
        let log_w: Vec<f64> = records.iter().map(|r| r.log_weight).collect();
        let weights = if log_w.is_empty() { Vec::new() } else { normalize_log_weights(&log_w)? };
        let mut dags = Vec::new();
        let mut params = Vec::new();
        for r in records {
            params.push(MleParams { weights: r.weights.concat(), noise_variances: r.noise_variances });
            dags.push(r.dag);
        }
        DagEnsemble::new(dags, weights, params)
    }
}

#[derive(Serialize, Deserialize)]
struct EnsembleRecord {
    dag: Dag,
    log_weight: f64,
    weights: Vec<Vec<f64>>,
    noise_variances: Vec<f64>,
}

pub fn functional_distribution(ens: &DagEnsemble, f: TargetFunctional) -> FunctionalDistribution {
    let classes = FunctionalClasses::new(ens.dags(), f);
    let probs = classes.masses(ens.weights());
    FunctionalDistribution { support: classes.values, probs }
}

/// Importance-reweighted posterior after observing `y` under design `xi`,
/// keeping the parameters fitted on the current data.
pub fn reweighted_posterior(ens: &DagEnsemble, y: &Dataset, xi: &Design) -> Result<Vec<f64>> {
    for &t in y.targets() {
        if xi.count(t) == 0 {
            return Err(Error::InvalidData(format!("row target {t} is not in the design")));
        }
    }
    let log_w: Vec<f64> = ens
        .dags()
        .iter()
        .zip(ens.params())
        .zip(ens.weights())
        .map(|((g, th), &w)| if w > 0.0 { w.ln() + log_likelihood(g, th, y) } else { f64::NEG_INFINITY })
        .collect();
    normalize_log_weights(&log_w)
}
