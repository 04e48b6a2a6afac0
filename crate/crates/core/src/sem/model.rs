use rand::Rng;

use super::scm::normal;
use super::{InterventionDist, LN_2PI};
use crate::graph::{Dag, InterventionTarget};

#[derive(Clone, Debug)]
struct NodeMechanism {
    parents: Vec<usize>,
    coefs: Vec<f64>,
    sd: f64,
    inv_var: f64,
    /// `-0.5 * ln(2π σ²)`
    log_norm: f64,
}

/// Per-node mechanisms in topological order, flattened for the hot loops of
/// sampling and row likelihoods.
#[derive(Clone, Debug)]
pub struct CompiledModel {
    p: usize,
    order: Vec<usize>,
    nodes: Vec<NodeMechanism>,
    intervention: InterventionDist,
}

impl CompiledModel {
    pub fn new(dag: &Dag, weights: &[f64], noise_variances: &[f64], intervention: InterventionDist) -> Self {
        let p = dag.p();
        let nodes = (0..p)
            .map(|j| {
                let parents = dag.parents(j);
                let coefs = parents.iter().map(|&i| weights[i * p + j]).collect();
                let var = noise_variances[j];
                NodeMechanism { parents, coefs, sd: var.sqrt(), inv_var: 1.0 / var, log_norm: -0.5 * (LN_2PI + var.ln()) }
            })
            .collect();
        CompiledModel { p, order: dag.topological_order(), nodes, intervention }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn sample_row<R: Rng + ?Sized>(&self, target: InterventionTarget, rng: &mut R, out: &mut [f64]) {
        let sd_int = self.intervention.variance.sqrt();
        for &j in &self.order {
            let z = normal(rng);
            out[j] = if target.contains(j) {
                self.intervention.mean + sd_int * z
            } else {
                let node = &self.nodes[j];
                let mean: f64 = node.parents.iter().zip(&node.coefs).map(|(&i, &c)| c * out[i]).sum();
                mean + node.sd * z
            };
        }
    }

    /// Log-density of one row, summed over non-intervened nodes only.
    pub fn row_log_likelihood(&self, row: &[f64], target: InterventionTarget) -> f64 {
        let mut ll = 0.0;
        for (j, node) in self.nodes.iter().enumerate() {
            if target.contains(j) {
                continue;
            }
            let mean: f64 = node.parents.iter().zip(&node.coefs).map(|(&i, &c)| c * row[i]).sum();
            let r = row[j] - mean;
            ll += node.log_norm - 0.5 * r * r * node.inv_var;
        }
        ll
    }
}
