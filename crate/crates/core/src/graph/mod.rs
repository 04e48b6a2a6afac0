//! Graph types and equivalence-class algorithms.
//!
//! Nodes are `0..p` with `p ≤ 64`; adjacency is kept as one `u64` bitmask per
//! node. Everything here is an immutable value and every operation is a pure
//! function, with a deterministic order (nodes ascending, edges lexicographic).

mod dag;
mod json;
mod mec;
mod pdag;
mod target;

pub use dag::Dag;
pub use json::GraphJson;
pub use mec::{all_dags, enumerate_mec, i_essential_graph, IEssential, Mec, DEFAULT_MEC_CAP};
pub(crate) use mec::shared_orientation;
pub use pdag::Pdag;
pub use target::{InterventionFamily, InterventionTarget};

use crate::error::{Error, Result};

pub const MAX_NODES: usize = 64;

pub(crate) fn iter_bits(mut bits: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if bits == 0 {
            None
        } else {
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(i)
        }
    })
}

#[inline]
pub(crate) fn bit(i: usize) -> u64 {
    1u64 << i
}

pub(crate) fn check_p(p: usize) -> Result<()> {
    if p == 0 {
        return Err(Error::InvalidGraph("graph needs at least one node".into()));
    }
    if p > MAX_NODES {
        return Err(Error::TooManyNodes { p, max: MAX_NODES });
    }
    Ok(())
}

pub(crate) fn check_nodes(nodes: impl IntoIterator<Item = usize>, p: usize) -> Result<()> {
    for node in nodes {
        if node >= p {
            return Err(Error::NodeOutOfRange { node, p });
        }
    }
    Ok(())
}

/// Chordal-component nodes of a CPDAG: nodes touching at least one undirected edge.
pub fn chordal_nodes(rep: &Pdag) -> Vec<usize> {
    (0..rep.p()).filter(|&i| rep.undirected_mask(i) != 0).collect()
}

/// Descendants of `node` in `g`, excluding `node` itself.
pub fn descendants(g: &Dag, node: usize) -> Vec<usize> {
    iter_bits(g.descendants_mask(node)).collect()
}

pub fn topological_order(g: &Dag) -> Vec<usize> {
    g.topological_order()
}

pub fn cpdag_of(g: &Dag) -> Pdag {
    g.cpdag()
}

pub fn meek_closure(g: &Pdag) -> Result<Pdag> {
    g.meek_closure()
}

pub fn mutilate(g: &Dag, target: InterventionTarget) -> Dag {
    g.mutilate(target)
}
