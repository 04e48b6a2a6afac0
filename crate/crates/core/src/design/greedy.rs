use serde::Serialize;

use super::budget::split_evenly;
use super::utility::{IncrementalUtility, UtilityEstimate};
use crate::error::{Error, Result};
use crate::graph::{InterventionFamily, InterventionTarget};
use crate::par;
use crate::sem::Design;

/// Largest `|family|^N_b` brute force will enumerate.
pub const BRUTE_FORCE_GUARD: f64 = 1e6;

/// One candidate evaluation during a greedy step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TraceEntry {
    pub step: usize,
    #[serde(serialize_with = "encode_target")]
    pub target: InterventionTarget,
    pub count: usize,
    pub value: f64,
    pub std_error: f64,
}

fn encode_target<S: serde::Serializer>(t: &InterventionTarget, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&t.encode())
}

#[derive(Clone, Debug)]
pub struct GreedyResult {
    pub design: Design,
    pub estimate: UtilityEstimate,
    pub trace: Vec<TraceEntry>,
}

/// Greedy maximization of `u` over designs of size `n_b`.
///
/// With `k = None` every step adds one sample of the best target. With
/// `k = Some(K)` there are `K` steps over distinct targets, the `i`-th
/// selection receiving its share of [`split_evenly`]`(n_b, K)`; a chosen
/// target leaves the pool. Ties go to the earlier family member.
pub fn greedy_design<U: IncrementalUtility>(
    u: &U,
    n_b: usize,
    family: &InterventionFamily,
    k: Option<usize>,
) -> Result<GreedyResult> {
    if n_b == 0 {
        return Err(Error::InvalidBudget("batch size must be at least 1".into()));
    }
    if let Some(k) = k {
        if k == 0 || k > family.len() {
            return Err(Error::InvalidBudget(format!("K = {k} with a family of {} targets", family.len())));
        }
    }
    let allocation: Vec<usize> = match k {
        None => vec![1; n_b],
        Some(k) => split_evenly(n_b, k).into_iter().filter(|&c| c > 0).collect(),
    };
    let mut pool: Vec<InterventionTarget> = family.targets().to_vec();
    let mut state = u.empty();
    let mut design = Design::new();
    let mut trace = Vec::new();
    let mut current = u.score(&state);
    for (step, &count) in allocation.iter().enumerate() {
        let evals = par::map(&pool, |&t| {
            let mut next = state.clone();
            u.add(&mut next, t, count);
            let est = u.score(&next);
            (est, next)
        });
        let mut best = 0;
        for (i, (est, _)) in evals.iter().enumerate() {
            trace.push(TraceEntry { step, target: pool[i], count, value: est.value, std_error: est.std_error });
            if est.value > evals[best].0.value {
                best = i;
            }
        }
        let (est, next) = evals.into_iter().nth(best).expect("pool is nonempty");
        state = next;
        current = est;
        design.add(pool[best], count);
        if k.is_some() {
            pool.remove(best);
        }
    }
    Ok(GreedyResult { design, estimate: current, trace })
}

/// Exact maximizer of `u` over all multisets of `n_b` family targets;
/// ties go to the first multiset in enumeration order (lexicographic in
/// family order).
pub fn brute_force_design<U: IncrementalUtility>(
    u: &U,
    n_b: usize,
    family: &InterventionFamily,
) -> Result<(Design, UtilityEstimate)> {
    let size = (family.len() as f64).powi(n_b as i32);
    if size > BRUTE_FORCE_GUARD {
        return Err(Error::SearchTooLarge { size, guard: BRUTE_FORCE_GUARD });
    }
    let mut best: Option<(Design, UtilityEstimate)> = None;
    enumerate_multisets(u, family.targets(), n_b, u.empty(), &mut Design::new(), &mut best);
    Ok(best.expect("at least one multiset"))
}

fn enumerate_multisets<U: IncrementalUtility>(
    u: &U,
    targets: &[InterventionTarget],
    remaining: usize,
    state: U::State,
    design: &mut Design,
    best: &mut Option<(Design, UtilityEstimate)>,
) {
    // Counts for the first target run from high to low, so multisets are
    // visited lexicographically with earlier targets preferred.
    let Some((&first, rest)) = targets.split_first() else {
        if remaining == 0 {
            let est = u.score(&state);
            if best.as_ref().is_none_or(|(_, b)| est.value > b.value) {
                *best = Some((design.clone(), est));
            }
        }
        return;
    };
    if rest.is_empty() {
        let mut s = state;
        u.add(&mut s, first, remaining);
        let saved = design.clone();
        design.add(first, remaining);
        enumerate_multisets(u, rest, 0, s, design, best);
        *design = saved;
        return;
    }
    for c in (0..=remaining).rev() {
        let mut s = state.clone();
        u.add(&mut s, first, c);
        let saved = design.clone();
        design.add(first, c);
        enumerate_multisets(u, rest, remaining - c, s, design, best);
        *design = saved;
    }
}
