use super::pdag::directed_cycle;
use super::{bit, check_p, Dag, InterventionFamily, Pdag};
use crate::error::{Error, Result};

pub const DEFAULT_MEC_CAP: usize = 10_000;

/// A Markov equivalence class: its members in enumeration order and the CPDAG
/// that represents it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mec {
    pub members: Vec<Dag>,
    pub representative: Pdag,
}

impl Mec {
    pub fn of(g: &Dag, cap: usize) -> Result<Mec> {
        enumerate_mec(&g.cpdag(), cap)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn position(&self, g: &Dag) -> Option<usize> {
        self.members.iter().position(|m| m == g)
    }
}

/// Lists every DAG in the class represented by `rep`.
///
/// Undirected edges are oriented one at a time (lowest edge first, `a → b`
/// before `b → a`), each choice followed by Meek propagation; branches that
/// create a cycle or a collider absent from `rep` are dropped.
pub fn enumerate_mec(rep: &Pdag, cap: usize) -> Result<Mec> {
    let closed = rep.meek_closure()?;
    let target_vs = closed.v_structures();
    let mut members = Vec::new();
    extend(&closed, &target_vs, cap, &mut members)?;
    if members.is_empty() {
        return Err(Error::Inconsistent("no DAG extension preserves the colliders".into()));
    }
    Ok(Mec { members, representative: closed })
}

fn extend(g: &Pdag, target_vs: &[(usize, usize, usize)], cap: usize, out: &mut Vec<Dag>) -> Result<()> {
    let Some((a, b)) = g.undirected_edges().first().copied() else {
        if g.v_structures() == target_vs {
            let dag = g.to_dag().expect("closed, fully directed and acyclic");
            if out.len() == cap {
                return Err(Error::MecTooLarge { cap });
            }
            out.push(dag);
        }
        return Ok(());
    };
    for (from, to) in [(a, b), (b, a)] {
        let mut child = g.clone();
        child.orient(from, to);
        let Ok(closed) = child.meek_closure() else { continue };
        if has_foreign_collider(&closed, target_vs) {
            continue;
        }
        extend(&closed, target_vs, cap, out)?;
    }
    Ok(())
}

fn has_foreign_collider(g: &Pdag, target_vs: &[(usize, usize, usize)]) -> bool {
    g.v_structures().iter().any(|v| target_vs.binary_search(v).is_err())
}

/// Members of an observational class that are interventionally equivalent to
/// a given DAG, together with the graph orienting exactly their shared edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IEssential {
    pub graph: Pdag,
    pub members: Vec<Dag>,
}

impl IEssential {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Filters `mec` down to the DAGs whose mutilated skeleta match those of `g`
/// for every target of `family`.
pub fn i_essential_graph(g: &Dag, family: &InterventionFamily, mec: &Mec) -> IEssential {
    let reference: Vec<Vec<u64>> = family.targets().iter().map(|&t| g.mutilated_skeleton(t)).collect();
    let members: Vec<Dag> = mec
        .members
        .iter()
        .filter(|h| {
            family
                .targets()
                .iter()
                .zip(&reference)
                .all(|(&t, skel)| t.is_observational() || h.mutilated_skeleton(t) == *skel)
        })
        .cloned()
        .collect();
    let graph = shared_orientation(g.p(), &members);
    IEssential { graph, members }
}

/// Orients edges that point the same way in every member; the rest stay
/// undirected. Members must share a skeleton.
pub(crate) fn shared_orientation(p: usize, members: &[Dag]) -> Pdag {
    let Some(first) = members.first() else {
        return Pdag::from_masks(p, vec![0; p], vec![0; p]);
    };
    let mut common: Vec<u64> = first.parent_masks().to_vec();
    for m in &members[1..] {
        for (c, &pa) in common.iter_mut().zip(m.parent_masks()) {
            *c &= pa;
        }
    }
    let skel = first.skeleton();
    let mut undirected = skel.clone();
    for (j, &pa) in common.iter().enumerate() {
        undirected[j] &= !pa;
        for i in super::iter_bits(pa) {
            undirected[i] &= !bit(j);
        }
    }
    Pdag::from_masks(p, common, undirected)
}

/// Every DAG on `p ≤ 5` nodes (1, 3, 25, 543, 29281 of them), in a fixed order.
pub fn all_dags(p: usize) -> Result<Vec<Dag>> {
    check_p(p)?;
    if p > 5 {
        return Err(Error::InvalidGraph(format!("exhaustive DAG enumeration supports p ≤ 5, got {p}")));
    }
    let pairs: Vec<(usize, usize)> = (0..p).flat_map(|a| (a + 1..p).map(move |b| (a, b))).collect();
    let mut out = Vec::new();
    let mut parents = vec![0u64; p];
    all_dags_rec(&pairs, 0, &mut parents, &mut out);
    Ok(out)
}

fn all_dags_rec(pairs: &[(usize, usize)], k: usize, parents: &mut Vec<u64>, out: &mut Vec<Dag>) {
    if k == pairs.len() {
        out.push(Dag::from_parent_masks_unchecked(parents.len(), parents.clone()));
        return;
    }
    let (a, b) = pairs[k];
    all_dags_rec(pairs, k + 1, parents, out);
    for (from, to) in [(a, b), (b, a)] {
        parents[to] |= bit(from);
        if !directed_cycle(parents) {
            all_dags_rec(pairs, k + 1, parents, out);
        }
        parents[to] &= !bit(from);
    }
}
