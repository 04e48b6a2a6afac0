use std::time::Instant;

use serde::Serialize;

use super::config::{BudgetSpec, ExperimentConfig, GraphSpec, LearnerKind, Strategy};
use crate::design::{equivalence_groups, greedy_design, residual_entropy, utility_meek, MiUtility};
use crate::error::{Error, Result};
use crate::graph::{Dag, InterventionFamily, InterventionTarget, Mec, DEFAULT_MEC_CAP};
use crate::posterior::{DagEnsemble, FunctionalClasses, TargetFunctional, UniformPrior};
use crate::sem::{chain_scm, NoiseModel};

/// The four-node graph on which the edge-orientation utility keeps picking
/// the same intervention: `2→0, 2→1, 2→3, 0→1, 0→3, 3→1` (0-based).
pub fn counterexample_dag() -> Dag {
    Dag::new(4, &[(2, 0), (2, 1), (2, 3), (0, 1), (0, 3), (3, 1)]).expect("acyclic")
}

/// The chain `0 → 1 → … → p-1`.
pub fn chain_dag(p: usize) -> Result<Dag> {
    let edges: Vec<(usize, usize)> = (1..p).map(|i| (i - 1, i)).collect();
    Dag::new(p, &edges)
}

/// One batch of a symbolic run: infinite data per selected target, so the
/// posterior is uniform over the truth's interventional class.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymbolicBatch {
    pub batch: usize,
    /// Score of every family target, in family order.
    pub scores: Vec<f64>,
    pub selected: InterventionTarget,
    /// Class members left after the batch.
    pub surviving: usize,
    /// Entropy of the uniform posterior over the survivors, in bits.
    pub entropy: f64,
}

/// Scores closer than this (relative) count as tied in symbolic runs, where
/// symmetric candidates differ only by rounding.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// Which utility drives a symbolic run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymbolicUtility {
    /// Residual entropy of the full graph under infinite data (minimized).
    Infinite,
    /// Expected newly oriented edges relative to the observational class (maximized).
    Meek,
}

/// Runs `batches` single-target batches against `truth`, restricting the
/// candidate set to the truth's interventional class after each batch.
/// Ties go to the earliest family member.
pub fn symbolic_run(
    truth: &Dag,
    family: &InterventionFamily,
    utility: SymbolicUtility,
    batches: usize,
) -> Result<Vec<SymbolicBatch>> {
    let mec = Mec::of(truth, DEFAULT_MEC_CAP)?;
    let classes = FunctionalClasses::new(&mec.members, TargetFunctional::FullGraph);
    let truth_idx = mec.position(truth).ok_or_else(|| Error::Inconsistent("truth missing from its class".into()))?;
    let mut chosen: Vec<InterventionTarget> = Vec::new();
    let mut alive: Vec<bool> = vec![true; mec.len()];
    let mut out = Vec::with_capacity(batches);
    for b in 1..=batches {
        let n_alive = alive.iter().filter(|&&a| a).count() as f64;
        let unit: Vec<f64> = alive.iter().map(|&a| if a { 1.0 } else { 0.0 }).collect();
        let post: Vec<f64> = unit.iter().map(|u| u / n_alive).collect();
        let scores: Vec<f64> = family
            .targets()
            .iter()
            .map(|&t| match utility {
                // Unit masses keep the sums integral, so ties are exact.
                SymbolicUtility::Meek => utility_meek(&mec, &unit, &[t]).map(|u| u / n_alive),
                SymbolicUtility::Infinite => {
                    let mut ts = chosen.clone();
                    ts.push(t);
                    Ok(residual_entropy(&mec.members, &post, &classes, &ts))
                }
            })
            .collect::<Result<_>>()?;
        let better = |a: f64, b: f64| {
            let tol = TIE_TOLERANCE * b.abs().max(1.0);
            match utility {
                SymbolicUtility::Meek => a > b + tol,
                SymbolicUtility::Infinite => a < b - tol,
            }
        };
        let best = (1..scores.len()).fold(0, |best, i| if better(scores[i], scores[best]) { i } else { best });
        let selected = family.targets()[best];
        chosen.push(selected);
        let group = equivalence_groups(&mec.members, &chosen)
            .into_iter()
            .find(|g| g.contains(&truth_idx))
            .expect("truth has a group");
        alive = (0..mec.len()).map(|i| group.contains(&i)).collect();
        let surviving = group.len();
        out.push(SymbolicBatch { batch: b, scores, selected, surviving, entropy: (surviving as f64).log2() });
    }
    Ok(out)
}

/// Nodes picked batch by batch on the `p`-node chain whose source is node 0,
/// one single-node intervention per batch under infinite data. Stops early
/// once the graph is identified.
pub fn bisection_demo(p: usize, batches: usize) -> Result<Vec<SymbolicBatch>> {
    if p < 3 || p.is_multiple_of(2) {
        return Err(Error::InvalidConfig(format!("bisection needs an odd p ≥ 3, got {p}")));
    }
    let truth = chain_dag(p)?;
    let family = InterventionFamily::singles(p)?;
    let mut run = symbolic_run(&truth, &family, SymbolicUtility::Infinite, batches)?;
    if let Some(k) = run.iter().position(|b| b.surviving == 1) {
        run.truncate(k + 1);
    }
    Ok(run)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CounterexampleReport {
    pub meek: Vec<SymbolicBatch>,
    pub infinite: Vec<SymbolicBatch>,
}

/// Both utilities on [`counterexample_dag`] with single-node targets, `K = 1`.
pub fn counterexample_repro(batches: usize) -> Result<CounterexampleReport> {
    let truth = counterexample_dag();
    let family = InterventionFamily::singles(4)?;
    Ok(CounterexampleReport {
        meek: symbolic_run(&truth, &family, SymbolicUtility::Meek, batches)?,
        infinite: symbolic_run(&truth, &family, SymbolicUtility::Infinite, batches)?,
    })
}

/// Adaptive runs on the `p`-node chain with `batches` batches of `n_b`
/// samples over single-node targets, starting from the known class.
pub fn consistency_config(p: usize, n_b: usize, batches: usize, replicates: usize, seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        graph: GraphSpec::Chain { p },
        budget: BudgetSpec { total: n_b * batches, batches, max_unique: None },
        strategies: vec![Strategy::Abcd],
        replicates,
        seed,
        ..base_config(p)
    }
}

/// The edge-orientation strategy on [`counterexample_dag`] with finite
/// batches and `K = 1`.
pub fn meek_plateau_config(n_b: usize, batches: usize, replicates: usize, seed: u64) -> ExperimentConfig {
    let g = counterexample_dag();
    ExperimentConfig {
        graph: GraphSpec::Explicit { p: 4, edges: g.edges().into_iter().map(|(a, b)| [a, b]).collect(), weights: None },
        budget: BudgetSpec { total: n_b * batches, batches, max_unique: Some(1) },
        strategies: vec![Strategy::Meek],
        replicates,
        seed,
        ..base_config(4)
    }
}

fn base_config(p: usize) -> ExperimentConfig {
    ExperimentConfig {
        graph: GraphSpec::Chain { p },
        budget: BudgetSpec { total: 0, batches: 0, max_unique: None },
        strategies: vec![],
        functional: TargetFunctional::FullGraph,
        family: "singles".into(),
        t: 20,
        m: 30,
        replicates: 1,
        seed: 0,
        known_mec: true,
        n_obs: 500,
        mec_cap: 100,
        multi_mec_flips: 0,
        noise: NoiseModel::Estimated,
        learner: LearnerKind::Auto,
        intervention: Default::default(),
    }
}

/// Chain `p = 11`, `N = 30` over 3 batches, `K` unlimited, MI vs random.
pub fn boxplot_config(replicates: usize, seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        graph: GraphSpec::Chain { p: 11 },
        budget: BudgetSpec { total: 30, batches: 3, max_unique: None },
        strategies: vec![Strategy::Abcd, Strategy::Random],
        replicates,
        seed,
        ..base_config(11)
    }
}

/// Random graphs `p = 8`, `ρ = 0.25`, `N = 96` split over `batches`
/// batches, one distinct target per batch, MI vs chordal-random.
pub fn er_curves_config(batches: usize, replicates: usize, seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        graph: GraphSpec::Er { p: 8, density: 0.25 },
        budget: BudgetSpec { total: 96, batches, max_unique: Some(1) },
        strategies: vec![Strategy::Abcd, Strategy::ChordalRandom],
        replicates,
        seed,
        ..base_config(8)
    }
}

/// One point of the runtime grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeRow {
    pub t: usize,
    pub m: usize,
    pub n_b: usize,
    pub family: usize,
    /// Row log-likelihood evaluations for one greedy batch: `|family| · N_b · T² · M`.
    pub evaluations: usize,
    pub seconds: f64,
}

/// Times one greedy MI batch on the `p`-node chain for every `(T, M)` in
/// the grid. The ensemble repeats the chain's class members, uniformly
/// weighted, until it has `T` entries.
pub fn runtime_probe(p: usize, grid: &[(usize, usize)], n_b: usize, seed: u64) -> Result<Vec<ProbeRow>> {
    let scm = chain_scm(p, seed)?;
    let data = scm.sample(InterventionTarget::OBSERVATIONAL, 20 * p, seed);
    let mec = Mec::of(scm.dag(), DEFAULT_MEC_CAP)?;
    let family = InterventionFamily::singles(p)?;
    let mut rows = Vec::with_capacity(grid.len());
    for &(t, m) in grid {
        if t == 0 || m == 0 {
            return Err(Error::InvalidConfig("T and M must be at least 1".into()));
        }
        let dags: Vec<Dag> = (0..t).map(|i| mec.members[i % mec.len()].clone()).collect();
        let ens = DagEnsemble::fit(dags, &data, NoiseModel::Estimated, &UniformPrior)?;
        let ens = ens.with_weights(vec![1.0 / t as f64; t])?;
        let u = MiUtility::new(&ens, TargetFunctional::FullGraph, m, seed);
        let start = Instant::now();
        greedy_design(&u, n_b, &family, None)?;
        let seconds = start.elapsed().as_secs_f64();
        rows.push(ProbeRow {
            t,
            m,
            n_b,
            family: family.len(),
            evaluations: family.len() * n_b * u.evaluations_per_sample(),
            seconds,
        });
    }
    Ok(rows)
}
