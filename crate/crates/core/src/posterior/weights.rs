use crate::error::{Error, Result};
use crate::graph::Dag;
use crate::sem::{log_likelihood, Dataset, MleParams};

/// Log prior mass over DAGs. Values need not be normalized.
pub trait DagPrior: Sync {
    fn log_prior(&self, g: &Dag) -> f64;
}

/// Equal mass on every candidate.
#[derive(Clone, Copy, Debug, Default)]
pub struct UniformPrior;

impl DagPrior for UniformPrior {
    fn log_prior(&self, _g: &Dag) -> f64 {
        0.0
    }
}

impl<F: Fn(&Dag) -> f64 + Sync> DagPrior for F {
    fn log_prior(&self, g: &Dag) -> f64 {
        self(g)
    }
}

/// `exp(x_i - logsumexp(x))`, computed with max-subtraction.
pub fn normalize_log_weights(log_w: &[f64]) -> Result<Vec<f64>> {
    let max = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return Err(Error::Numerical(format!("log weights have no finite maximum ({max})")));
    }
    let mut w: Vec<f64> = log_w.iter().map(|&x| (x - max).exp()).collect();
    let total: f64 = w.iter().sum();
    for x in &mut w {
        *x /= total;
    }
    Ok(w)
}

/// Same as [`normalize_log_weights`] into a caller-owned buffer; an all
/// `-inf` input yields all zeros.
pub(crate) fn normalize_into(log_w: &[f64], out: &mut [f64]) {
    let max = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        out.fill(0.0);
        return;
    }
    let mut total = 0.0;
    for (o, &x) in out.iter_mut().zip(log_w) {
        *o = (x - max).exp();
        total += *o;
    }
    for o in out.iter_mut() {
        *o /= total;
    }
}

/// Empirical-Bayes posterior weights: `w_i ∝ prior(G_i) · P(data | G_i, θ̂_i)`.
pub fn posterior_weights(dags: &[Dag], params: &[MleParams], data: &Dataset, prior: &dyn DagPrior) -> Result<Vec<f64>> {
    if dags.is_empty() || dags.len() != params.len() {
        return Err(Error::InvalidConfig(format!("{} DAGs with {} parameter sets", dags.len(), params.len())));
    }
    let log_w: Vec<f64> = dags
        .iter()
        .zip(params)
        .map(|(g, th)| prior.log_prior(g) + log_likelihood(g, th, data))
        .collect();
    normalize_log_weights(&log_w)
}
