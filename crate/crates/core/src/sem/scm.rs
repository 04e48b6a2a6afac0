use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{CompiledModel, Dataset};
use crate::error::{Error, Result};
use crate::graph::{Dag, InterventionTarget};
use crate::rng;

/// Distribution assigned to each intervened node.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterventionDist {
    pub mean: f64,
    pub variance: f64,
}

impl Default for InterventionDist {
    fn default() -> Self {
        InterventionDist { mean: 0.0, variance: 1.0 }
    }
}

/// A DAG with edge weights and noise variances.
///
/// `weights` is `p × p` row-major; entry `(i, j)` is the weight of `i → j` and
/// is non-zero exactly on the edges of `dag`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearGaussianScm {
    dag: Dag,
    weights: Vec<f64>,
    noise_variances: Vec<f64>,
    #[serde(default)]
    intervention: InterventionDist,
}

impl LinearGaussianScm {
    pub fn new(dag: Dag, weights: Vec<f64>, noise_variances: Vec<f64>) -> Result<Self> {
        Self::with_intervention(dag, weights, noise_variances, InterventionDist::default())
    }

    pub fn with_intervention(
        dag: Dag,
        weights: Vec<f64>,
        noise_variances: Vec<f64>,
        intervention: InterventionDist,
    ) -> Result<Self> {
        let p = dag.p();
        if weights.len() != p * p {
            return Err(Error::InvalidGraph(format!("weight matrix must be {p}x{p}")));
        }
        if noise_variances.len() != p {
            return Err(Error::InvalidGraph(format!("expected {p} noise variances")));
        }
        for i in 0..p {
            for j in 0..p {
                let w = weights[i * p + j];
                if !w.is_finite() {
                    return Err(Error::InvalidGraph(format!("weight {i}->{j} is not finite")));
                }
                if (w != 0.0) != dag.has_edge(i, j) {
                    return Err(Error::InvalidGraph(format!(
                        "weight sparsity does not match the DAG at {i}->{j}"
                    )));
                }
            }
        }
        if let Some(j) = noise_variances.iter().position(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidGraph(format!("noise variance of node {j} must be positive")));
        }
        if !(intervention.variance > 0.0 && intervention.variance.is_finite() && intervention.mean.is_finite()) {
            return Err(Error::InvalidGraph("intervention variance must be positive".into()));
        }
        Ok(LinearGaussianScm { dag, weights, noise_variances, intervention })
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn p(&self) -> usize {
        self.dag.p()
    }

    pub fn weight(&self, from: usize, to: usize) -> f64 {
        self.weights[from * self.p() + to]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn noise_variances(&self) -> &[f64] {
        &self.noise_variances
    }

    pub fn intervention(&self) -> InterventionDist {
        self.intervention
    }

    pub fn compile(&self) -> CompiledModel {
        CompiledModel::new(&self.dag, &self.weights, &self.noise_variances, self.intervention)
    }

    /// Draws `n` rows under `target`. Rows are generated in topological order
    /// from a stream derived from `(seed, target)`.
    pub fn sample(&self, target: InterventionTarget, n: usize, seed: u64) -> Dataset {
        let model = self.compile();
        let mut rng = rng::rng_from(seed, &[target.bits()]);
        let mut data = Dataset::with_capacity(self.p(), n);
        let mut row = vec![0.0; self.p()];
        for _ in 0..n {
            model.sample_row(target, &mut rng, &mut row);
            data.push_row(&row, target).expect("row width matches p");
        }
        data
    }

    /// Covariance implied by the model under `target`:
    /// `(I − B)^{-T} Ω (I − B)^{-1}` with `B` the (mutilated) weight matrix.
    pub fn covariance(&self, target: InterventionTarget) -> Vec<f64> {
        let p = self.p();
        let order = self.dag.topological_order();
        // Column j of Σ built recursively: Σ_jk = Σ_i θ_ij Σ_ik for k before j.
        let mut cov = vec![0.0; p * p];
        for (pos, &j) in order.iter().enumerate() {
            let intervened = target.contains(j);
            for &k in &order[..pos] {
                let c = if intervened {
                    0.0
                } else {
                    self.dag.parents(j).iter().map(|&i| self.weight(i, j) * cov[i * p + k]).sum()
                };
                cov[j * p + k] = c;
                cov[k * p + j] = c;
            }
            cov[j * p + j] = if intervened {
                self.intervention.variance
            } else {
                let pa = self.dag.parents(j);
                let mut v = self.noise_variances[j];
                for &a in &pa {
                    for &b in &pa {
                        v += self.weight(a, j) * self.weight(b, j) * cov[a * p + b];
                    }
                }
                v
            };
        }
        cov
    }
}

pub(crate) fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}
