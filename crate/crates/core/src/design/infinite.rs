use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::{shared_orientation, Dag, InterventionTarget, Mec};
use crate::posterior::{entropy_bits, FunctionalClasses};

type Signature = Vec<(Vec<u64>, Vec<(usize, usize, usize)>)>;

/// What an infinite amount of data under `targets` (plus observational data)
/// reveals about `g`: skeleton and colliders of every mutilated graph. Two
/// DAGs are interventionally equivalent iff their signatures agree.
fn signature(g: &Dag, targets: &[InterventionTarget]) -> Signature {
    std::iter::once(InterventionTarget::OBSERVATIONAL)
        .chain(targets.iter().copied().filter(|t| !t.is_observational()))
        .map(|t| {
            let m = g.mutilate(t);
            (m.skeleton(), m.v_structures())
        })
        .collect()
}

/// Groups indices of `dags` into interventional equivalence classes under
/// `targets`, in order of first appearance.
pub fn equivalence_groups(dags: &[Dag], targets: &[InterventionTarget]) -> Vec<Vec<usize>> {
    let mut index: HashMap<Signature, usize> = HashMap::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, g) in dags.iter().enumerate() {
        let k = *index.entry(signature(g, targets)).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[k].push(i);
    }
    groups
}

fn check_targets(p: usize, targets: &[InterventionTarget]) -> Result<()> {
    for t in targets {
        t.validate(p)?;
    }
    Ok(())
}

/// Mean of `log₂ |class of G|` over the members `G` of `mec`, where classes
/// are interventional equivalence classes under `targets ∪ {∅}`. This is a
/// residual entropy: lower is better.
pub fn utility_infinite(mec: &Mec, targets: &[InterventionTarget]) -> Result<f64> {
    if mec.is_empty() {
        return Err(Error::InvalidConfig("empty equivalence class".into()));
    }
    check_targets(mec.representative.p(), targets)?;
    let n = mec.len() as f64;
    Ok(equivalence_groups(&mec.members, targets)
        .iter()
        .map(|g| {
            let k = g.len() as f64;
            k / n * k.log2()
        })
        .sum())
}

/// Expected entropy of a functional once infinite data under `targets` has
/// restricted the posterior to the true DAG's interventional class:
/// `Σ_G w_G · H(f | class of G)`. With uniform weights over an MEC and the
/// full-graph functional this equals [`utility_infinite`].
pub fn residual_entropy(dags: &[Dag], weights: &[f64], classes: &FunctionalClasses, targets: &[InterventionTarget]) -> f64 {
    let support: Vec<usize> = (0..dags.len()).filter(|&i| weights[i] > 0.0).collect();
    let sub: Vec<Dag> = support.iter().map(|&i| dags[i].clone()).collect();
    let mut total = 0.0;
    for group in equivalence_groups(&sub, targets) {
        let mut mass = vec![0.0; classes.num_values()];
        let mut w_group = 0.0;
        for &k in &group {
            let i = support[k];
            mass[classes.class[i]] += weights[i];
            w_group += weights[i];
        }
        for x in &mut mass {
            *x /= w_group;
        }
        total += w_group * entropy_bits(&mass);
    }
    total
}

/// Expected number of edges oriented beyond the observational essential
/// graph once `targets` are applied: `Σ_G P(G) · A(Ess^I(G))`, with
/// `Ess^I(G)` computed within the full class `mec`.
pub fn utility_meek(mec: &Mec, posterior: &[f64], targets: &[InterventionTarget]) -> Result<f64> {
    if posterior.len() != mec.len() {
        return Err(Error::InvalidConfig(format!(
            "posterior has {} entries for a class of {}",
            posterior.len(),
            mec.len()
        )));
    }
    check_targets(mec.representative.p(), targets)?;
    let p = mec.representative.p();
    let base = mec.representative.num_directed();
    let mut u = 0.0;
    for group in equivalence_groups(&mec.members, targets) {
        let mass: f64 = group.iter().map(|&i| posterior[i]).sum();
        if mass == 0.0 {
            continue;
        }
        let members: Vec<Dag> = group.iter().map(|&i| mec.members[i].clone()).collect();
        let directed = shared_orientation(p, &members).num_directed();
        u += mass * (directed - base) as f64;
    }
    Ok(u)
}
