use rand::seq::IndexedRandom;
use serde::Serialize;

use super::config::{ExperimentConfig, GraphSpec, LearnerKind, Strategy};
use crate::design::{
    chordal_random_strategy, greedy_design, infinite_sample_strategy, meek_strategy, random_strategy, BatchRecord,
    MiUtility,
};
use crate::error::{Error, Result};
use crate::graph::{all_dags, Dag, InterventionTarget, Mec, DEFAULT_MEC_CAP};
use crate::par;
use crate::posterior::{
    dag_bootstrap_with, DagEnsemble, DagLearner, ExhaustiveLearner, FunctionalDistribution, HillClimbLearner,
    TargetFunctional, UniformPrior,
};
use crate::rng::{self, stream};
use crate::sem::{chain_scm, er_scm, random_weight, Dataset, Design, InterventionDist, LinearGaussianScm, NoiseModel};

/// Attempts at drawing a random graph whose class size is acceptable.
pub const MAX_TRUTH_ATTEMPTS: u64 = 1000;

/// The ground truth of one replicate.
#[derive(Clone, Debug)]
pub struct Truth {
    pub scm: LinearGaussianScm,
    pub mec: Mec,
    /// Redraws needed before the class size was acceptable.
    pub attempt: u64,
}

/// Draws the replicate's SCM. Random graphs whose class has fewer than two
/// or more than `mec_cap` members are redrawn from a fresh sub-seed; the
/// draw depends only on `(seed, replicate)`, never on the strategy.
pub fn draw_truth(config: &ExperimentConfig, replicate: usize) -> Result<Truth> {
    if let Some(dag) = config.graph.explicit_dag() {
        let dag = dag?;
        let seed = rng::derive_seed(config.seed, &[stream::TRUTH, replicate as u64, 0]);
        let scm = explicit_scm(&config.graph, dag, seed, config.intervention)?;
        let mec = Mec::of(scm.dag(), config.mec_cap)?;
        return Ok(Truth { scm, mec, attempt: 0 });
    }
    for attempt in 0..MAX_TRUTH_ATTEMPTS {
        let seed = rng::derive_seed(config.seed, &[stream::TRUTH, replicate as u64, attempt]);
        let scm = match config.graph {
            GraphSpec::Chain { p } => chain_scm(p, seed)?,
            GraphSpec::Er { p, density } => er_scm(p, density, seed)?,
            GraphSpec::Explicit { .. } => unreachable!("handled above"),
        };
        match Mec::of(scm.dag(), config.mec_cap) {
            Ok(mec) if mec.len() >= 2 => {
                let scm = LinearGaussianScm::with_intervention(
                    scm.dag().clone(),
                    scm.weights().to_vec(),
                    scm.noise_variances().to_vec(),
                    config.intervention,
                )?;
                return Ok(Truth { scm, mec, attempt });
            }
            Ok(_) | Err(Error::MecTooLarge { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::InvalidConfig(format!(
        "no graph with an equivalence class of 2..={} members in {MAX_TRUTH_ATTEMPTS} draws",
        config.mec_cap
    )))
}

fn explicit_scm(spec: &GraphSpec, dag: Dag, seed: u64, intervention: InterventionDist) -> Result<LinearGaussianScm> {
    let GraphSpec::Explicit { weights, .. } = spec else { unreachable!() };
    let p = dag.p();
    let mut rng = rng::rng_from(seed, &[0x5747]);
    let mut w = vec![0.0; p * p];
    for (k, (i, j)) in dag.edges().into_iter().enumerate() {
        w[i * p + j] = match weights {
            Some(ws) => ws[edge_index(spec, i, j).unwrap_or(k)],
            None => random_weight(&mut rng),
        };
    }
    LinearGaussianScm::with_intervention(dag, w, vec![1.0; p], intervention)
}

fn edge_index(spec: &GraphSpec, i: usize, j: usize) -> Option<usize> {
    let GraphSpec::Explicit { edges, .. } = spec else { return None };
    edges.iter().position(|&[a, b]| a == i && b == j)
}

/// Union of the true class and the classes of graphs reached by 1..=`flips`
/// successive reversals of random non-covered edges (reversals that would
/// create a cycle are skipped), truncated to `cap` members.
pub fn multi_mec_candidates(truth: &Dag, flips: usize, cap: usize, seed: u64) -> Result<Vec<Dag>> {
    let mut out: Vec<Dag> = Mec::of(truth, DEFAULT_MEC_CAP)?.members;
    out.truncate(cap);
    let mut rng = rng::rng_from(seed, &[stream::CANDIDATES]);
    let mut current = truth.clone();
    for _ in 0..flips {
        let mut options: Vec<Dag> = current
            .edges()
            .into_iter()
            .filter(|&(i, j)| !current.is_covered(i, j))
            .filter_map(|(i, j)| current.reversed(i, j))
            .collect();
        options.sort();
        let Some(next) = options.choose(&mut rng).cloned() else { break };
        current = next;
        let Ok(mec) = Mec::of(&current, DEFAULT_MEC_CAP) else { continue };
        for g in mec.members {
            if out.len() >= cap {
                return Ok(out);
            }
            if !out.contains(&g) {
                out.push(g);
            }
        }
    }
    out.truncate(cap);
    Ok(out)
}

/// Outcome of one adaptive run against one ground truth.
#[derive(Clone, Debug)]
pub struct ReplicateResult {
    pub strategy: Strategy,
    pub replicate: usize,
    pub truth: Dag,
    pub mec_size: usize,
    pub prior_entropy: f64,
    pub records: Vec<BatchRecord>,
    /// `(H₀ − H_B) / H₀`, or 0 when `H₀ = 0`.
    pub entropy_reduction: f64,
    /// Posterior mass on the true functional value, before batch 1 and after each batch.
    pub truth_mass: Vec<f64>,
    pub final_distribution: FunctionalDistribution,
}

impl ReplicateResult {
    /// Entropy reduction after each batch.
    pub fn reductions(&self) -> Vec<f64> {
        self.records.iter().map(|r| reduction(self.prior_entropy, r.post_entropy)).collect()
    }
}

fn reduction(h0: f64, h: f64) -> f64 {
    if h0 > 0.0 {
        (h0 - h) / h0
    } else {
        0.0
    }
}

/// Structure learner for unknown-class runs: exhaustive search over every
/// DAG for `p ≤ 5` under `Auto`, hill climbing otherwise.
pub fn make_learner(kind: LearnerKind, p: usize, noise: NoiseModel) -> Result<Box<dyn DagLearner>> {
    match kind {
        LearnerKind::Exhaustive => Ok(Box::new(ExhaustiveLearner::new(all_dags(p)?, noise)?)),
        LearnerKind::Auto if p <= 5 => Ok(Box::new(ExhaustiveLearner::new(all_dags(p)?, noise)?)),
        _ => Ok(Box::new(HillClimbLearner { noise, ..HillClimbLearner::default() })),
    }
}

/// One-sided exact sign test: `P(X ≥ wins)` for `X ~ Binomial(wins + losses, 1/2)`.
/// Ties are dropped before calling.
pub fn sign_test(wins: usize, losses: usize) -> f64 {
    let n = wins + losses;
    // log C(n, k) accumulated term by term to stay finite for large n.
    let mut log_c = 0.0;
    let mut tail = 0.0;
    for k in 0..=n {
        if k > 0 {
            log_c += ((n - k + 1) as f64).ln() - (k as f64).ln();
        }
        if k >= wins {
            tail += (log_c - n as f64 * std::f64::consts::LN_2).exp();
        }
    }
    tail.min(1.0)
}

struct Posterior<'a> {
    config: &'a ExperimentConfig,
    candidates: Option<Vec<Dag>>,
    learner: Option<Box<dyn DagLearner>>,
    seed: u64,
}

impl Posterior<'_> {
    fn at(&self, data: &Dataset, batch: usize) -> Result<DagEnsemble> {
        match (&self.candidates, &self.learner) {
            (Some(c), _) => DagEnsemble::fit(c.clone(), data, self.config.noise, &UniformPrior),
            (None, Some(l)) => dag_bootstrap_with(
                data,
                self.config.t,
                l.as_ref(),
                rng::derive_seed(self.seed, &[stream::BOOTSTRAP, batch as u64]),
                self.config.noise,
                &UniformPrior,
            ),
            (None, None) => unreachable!("one source of candidates is always set"),
        }
    }
}

fn truth_mass(ens: &DagEnsemble, f: TargetFunctional, truth: &Dag) -> f64 {
    ens.functional_distribution(f).prob_of(&f.evaluate(truth))
}

/// Runs `strategy` for every batch of the budget against replicate `replicate`.
pub fn run_replicate(config: &ExperimentConfig, strategy: Strategy, replicate: usize) -> Result<ReplicateResult> {
    config.validate()?;
    let truth = draw_truth(config, replicate)?;
    run_with_truth(config, strategy, replicate, &truth)
}

pub fn run_with_truth(
    config: &ExperimentConfig,
    strategy: Strategy,
    replicate: usize,
    truth: &Truth,
) -> Result<ReplicateResult> {
    let budget = config.budget()?;
    let family = config.family()?;
    let f = config.functional;
    let p = config.graph.p();
    let rep_seed = rng::derive_seed(config.seed, &[stream::TRUTH, replicate as u64]);
    let scm = &truth.scm;
    let true_dag = scm.dag().clone();

    let mut data = scm.sample(InterventionTarget::OBSERVATIONAL, config.n_obs, rng::derive_seed(rep_seed, &[stream::OBSERVATIONAL]));
    let posterior = if config.known_mec {
        let candidates = if config.multi_mec_flips > 0 {
            multi_mec_candidates(&true_dag, config.multi_mec_flips, config.mec_cap, rep_seed)?
        } else {
            truth.mec.members.clone()
        };
        Posterior { config, candidates: Some(candidates), learner: None, seed: rep_seed }
    } else {
        Posterior { config, candidates: None, learner: Some(make_learner(config.learner, p, config.noise)?), seed: rep_seed }
    };

    let mut ens = posterior.at(&data, 0)?;
    let prior_entropy = ens.functional_distribution(f).entropy();
    let mut masses = vec![truth_mass(&ens, f, &true_dag)];
    let mut records = Vec::with_capacity(budget.batches);
    for b in 0..budget.batches {
        let pre = ens.functional_distribution(f).entropy();
        let s_seed = rng::derive_seed(rep_seed, &[stream::STRATEGY, strategy.code(), b as u64]);
        let n_b = budget.per_batch;
        let k = budget.max_unique;
        let design = match strategy {
            Strategy::Abcd => {
                let u = MiUtility::with_intervention(&ens, f, config.m, s_seed, config.intervention);
                greedy_design(&u, n_b, &family, k)?.design
            }
            Strategy::Random => random_strategy(&family, n_b, k, s_seed)?,
            Strategy::ChordalRandom => {
                let rep = if config.known_mec {
                    truth.mec.representative.clone()
                } else {
                    let best = (0..ens.len()).fold(0, |a, i| if ens.weights()[i] > ens.weights()[a] { i } else { a });
                    ens.dags()[best].cpdag()
                };
                chordal_random_strategy(&rep, &family, n_b, k, s_seed)?
            }
            Strategy::InfiniteSample => infinite_sample_strategy(ens.dags(), ens.weights(), f, &family, n_b, k)?,
            Strategy::Meek => {
                let posterior: Vec<f64> = truth.mec.members.iter().map(|g| ens.mass_on(g)).collect();
                meek_strategy(&truth.mec, &posterior, &family, n_b, k)?
            }
        };
        let rows = collect(scm, &design, rng::derive_seed(rep_seed, &[stream::REAL_DATA, b as u64]));
        data.extend(&rows);
        ens = posterior.at(&data, b + 1)?;
        let post = ens.functional_distribution(f).entropy();
        masses.push(truth_mass(&ens, f, &true_dag));
        records.push(BatchRecord { batch: b + 1, design, pre_entropy: pre, post_entropy: post, rows });
    }
    let final_distribution = ens.functional_distribution(f);
    let entropy_reduction = reduction(prior_entropy, final_distribution.entropy());
    Ok(ReplicateResult {
        strategy,
        replicate,
        truth: true_dag,
        mec_size: truth.mec.len(),
        prior_entropy,
        records,
        entropy_reduction,
        truth_mass: masses,
        final_distribution,
    })
}

/// Rows from the true model for every target of the design.
fn collect(scm: &LinearGaussianScm, design: &Design, seed: u64) -> Dataset {
    let mut rows = Dataset::new(scm.p());
    for (t, c) in design.iter() {
        rows.extend(&scm.sample(t, c, rng::derive_seed(seed, &[t.bits()])));
    }
    rows
}

/// Quartiles and mean of one (strategy, batch) cell.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    pub strategy: Strategy,
    pub batches: usize,
    pub batch: usize,
    pub n: usize,
    pub mean: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
}

/// Linear-interpolation quantile of sorted data (the common "type 7").
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

#[derive(Clone, Debug)]
pub struct ExperimentOutput {
    pub config: ExperimentConfig,
    /// Strategy-major, then replicate index.
    pub results: Vec<ReplicateResult>,
    pub summary: Vec<SummaryRow>,
}

/// Runs every (strategy, replicate) pair, in parallel when enabled. Results
/// are ordered and seeded by index, so the output does not depend on the
/// thread count.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    config.validate()?;
    let truths = par::try_map_range(config.replicates, |r| draw_truth(config, r))?;
    let jobs: Vec<(Strategy, usize)> =
        config.strategies.iter().flat_map(|&s| (0..config.replicates).map(move |r| (s, r))).collect();
    let results = par::map(&jobs, |&(s, r)| run_with_truth(config, s, r, &truths[r]))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let summary = summarize(config, &results);
    Ok(ExperimentOutput { config: config.clone(), results, summary })
}

pub fn summarize(config: &ExperimentConfig, results: &[ReplicateResult]) -> Vec<SummaryRow> {
    let mut out = Vec::new();
    for &s in &config.strategies {
        let rs: Vec<&ReplicateResult> = results.iter().filter(|r| r.strategy == s).collect();
        for b in 1..=config.budget.batches {
            let mut xs: Vec<f64> = rs.iter().map(|r| r.reductions()[b - 1]).collect();
            xs.sort_by(f64::total_cmp);
            let mean = xs.iter().sum::<f64>() / xs.len() as f64;
            out.push(SummaryRow {
                strategy: s,
                batches: config.budget.batches,
                batch: b,
                n: xs.len(),
                mean,
                q1: quantile(&xs, 0.25),
                median: quantile(&xs, 0.5),
                q3: quantile(&xs, 0.75),
            });
        }
    }
    out
}
