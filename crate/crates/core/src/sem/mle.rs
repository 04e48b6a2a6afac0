use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{CompiledModel, Dataset, InterventionDist, LinearGaussianScm, LN_2PI};
use crate::error::{Error, Result};
use crate::graph::Dag;

/// How noise variances are obtained when fitting.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "value")]
pub enum NoiseModel {
    /// Residual mean square of the regression (the Gaussian MLE).
    #[default]
    Estimated,
    /// A fixed, known variance shared by every node.
    Known(f64),
}

/// Maximum-likelihood edge weights and noise variances for one DAG.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MleParams {
    pub weights: Vec<f64>,
    pub noise_variances: Vec<f64>,
}

impl MleParams {
    pub fn weight(&self, from: usize, to: usize) -> f64 {
        let p = self.noise_variances.len();
        self.weights[from * p + to]
    }

    pub fn compile(&self, dag: &Dag, intervention: InterventionDist) -> CompiledModel {
        CompiledModel::new(dag, &self.weights, &self.noise_variances, intervention)
    }

    /// The fitted model as an SCM; fitted weights that are exactly zero are
    /// nudged to the smallest normal value so the sparsity invariant holds.
    pub fn to_scm(&self, dag: &Dag, intervention: InterventionDist) -> Result<LinearGaussianScm> {
        let p = dag.p();
        let mut weights = self.weights.clone();
        for (i, j) in dag.edges() {
            if weights[i * p + j] == 0.0 {
                weights[i * p + j] = f64::MIN_POSITIVE;
            }
        }
        LinearGaussianScm::with_intervention(dag.clone(), weights, self.noise_variances.clone(), intervention)
    }
}

/// Per-node second-moment matrices over the rows that spare that node. Any
/// local regression `X_j ~ X_S` is then a `|S|×|S|` solve.
#[derive(Clone, Debug)]
pub struct SufficientStats {
    p: usize,
    counts: Vec<usize>,
    moments: Vec<DMatrix<f64>>,
}

/// Result of one local regression.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalFit {
    pub coefs: Vec<f64>,
    pub rss: f64,
    pub n: usize,
}

impl LocalFit {
    /// Maximized Gaussian log-likelihood of the node's rows.
    pub fn log_likelihood(&self, noise: NoiseModel) -> f64 {
        let n = self.n as f64;
        match noise {
            NoiseModel::Estimated => -0.5 * n * (LN_2PI + (self.rss / n).ln() + 1.0),
            NoiseModel::Known(v) => -0.5 * n * (LN_2PI + v.ln()) - 0.5 * self.rss / v,
        }
    }
}

impl SufficientStats {
    pub fn new(data: &Dataset) -> Self {
        let p = data.p();
        let mut full = DMatrix::<f64>::zeros(p, p);
        let mut counts = vec![0usize; p];
        // Rows are grouped by target: accumulate one matrix per distinct
        // target, then add it to every node the target spares.
        let mut by_target: std::collections::BTreeMap<u64, (DMatrix<f64>, usize)> = Default::default();
        for (row, t) in data.rows() {
            let entry = by_target.entry(t.bits()).or_insert_with(|| (DMatrix::zeros(p, p), 0));
            let x = nalgebra::DVectorView::from_slice(row, p);
            entry.0.ger(1.0, &x, &x, 1.0);
            entry.1 += 1;
        }
        let mut moments = vec![DMatrix::<f64>::zeros(p, p); p];
        for (&bits, (m, n)) in &by_target {
            full += m;
            for j in 0..p {
                if bits >> j & 1 == 0 {
                    moments[j] += m;
                    counts[j] += n;
                }
            }
        }
        SufficientStats { p, counts, moments }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Rows that do not intervene on `node`.
    pub fn count(&self, node: usize) -> usize {
        self.counts[node]
    }

    /// Least squares of `X_node` on `X_parents` over rows sparing `node`.
    pub fn fit_node(&self, node: usize, parents: &[usize]) -> Result<LocalFit> {
        let k = parents.len();
        let n = self.counts[node];
        if n < k + 1 {
            return Err(Error::InsufficientData { node, have: n, need: k + 1 });
        }
        let s = &self.moments[node];
        let yty = s[(node, node)];
        if k == 0 {
            return Ok(LocalFit { coefs: Vec::new(), rss: yty, n });
        }
        let gram = DMatrix::from_fn(k, k, |a, b| s[(parents[a], parents[b])]);
        let xty = DVector::from_fn(k, |a, _| s[(parents[a], node)]);
        let chol = gram.clone().cholesky().ok_or(Error::Singular { node })?;
        let l = chol.l_dirty();
        if !(0..k).all(|a| l[(a, a)] * l[(a, a)] > 1e-12 * gram[(a, a)]) {
            return Err(Error::Singular { node });
        }
        let beta = chol.solve(&xty);
        if beta.iter().any(|c| !c.is_finite()) {
            return Err(Error::Singular { node });
        }
        let rss = (yty - beta.dot(&xty)).max(0.0);
        Ok(LocalFit { coefs: beta.iter().copied().collect(), rss, n })
    }
}

/// Fits each node by least squares of `X_j` on `X_{Pa(j)}` (no intercept),
/// using only rows that do not intervene on `j`.
pub fn mle_fit(g: &Dag, data: &Dataset, noise: NoiseModel) -> Result<MleParams> {
    if data.p() != g.p() {
        return Err(Error::InvalidData(format!("dataset has {} columns, graph has {} nodes", data.p(), g.p())));
    }
    mle_fit_stats(g, &SufficientStats::new(data), noise)
}

pub fn mle_fit_stats(g: &Dag, stats: &SufficientStats, noise: NoiseModel) -> Result<MleParams> {
    let p = g.p();
    let mut weights = vec![0.0; p * p];
    let mut noise_variances = vec![0.0; p];
    for j in 0..p {
        let parents = g.parents(j);
        let fit = stats.fit_node(j, &parents)?;
        for (&i, &c) in parents.iter().zip(&fit.coefs) {
            weights[i * p + j] = c;
        }
        noise_variances[j] = match noise {
            NoiseModel::Known(v) => v,
            NoiseModel::Estimated => fit.rss / fit.n as f64,
        };
        if !(noise_variances[j] > 0.0 && noise_variances[j].is_finite()) {
            return Err(Error::Numerical(format!("fitted noise variance of node {j} is {}", noise_variances[j])));
        }
    }
    Ok(MleParams { weights, noise_variances })
}

/// Sum over rows of the Gaussian log-density of every non-intervened node
/// given its parents. Intervened nodes contribute nothing: their density is
/// the same under every graph.
pub fn log_likelihood(g: &Dag, params: &MleParams, data: &Dataset) -> f64 {
    let model = params.compile(g, InterventionDist::default());
    data.rows().map(|(row, t)| model.row_log_likelihood(row, t)).sum()
}
