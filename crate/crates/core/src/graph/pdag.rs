use std::fmt;

use super::dag::v_structures_from;
use super::{bit, check_nodes, check_p, iter_bits, Dag};
use crate::error::{Error, Result};

/// A partially directed graph: directed edges as parent masks plus symmetric
/// undirected neighbour masks. Used for essential graphs and their
/// interventional refinements.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Pdag {
    p: usize,
    parents: Vec<u64>,
    undirected: Vec<u64>,
}

impl Pdag {
    pub fn new(p: usize, directed: &[(usize, usize)], undirected: &[(usize, usize)]) -> Result<Self> {
        check_p(p)?;
        let mut parents = vec![0u64; p];
        let mut und = vec![0u64; p];
        for &(a, b) in directed.iter().chain(undirected) {
            check_nodes([a, b], p)?;
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at node {a}")));
            }
        }
        for &(a, b) in directed {
            if parents[b] & bit(a) != 0 || parents[a] & bit(b) != 0 {
                return Err(Error::InvalidGraph(format!("edge between {a} and {b} listed twice")));
            }
            parents[b] |= bit(a);
        }
        for &(a, b) in undirected {
            if parents[b] & bit(a) != 0 || parents[a] & bit(b) != 0 || und[a] & bit(b) != 0 {
                return Err(Error::InvalidGraph(format!("edge between {a} and {b} listed twice")));
            }
            und[a] |= bit(b);
            und[b] |= bit(a);
        }
        Ok(Pdag { p, parents, undirected: und })
    }

    pub(crate) fn from_masks(p: usize, parents: Vec<u64>, undirected: Vec<u64>) -> Self {
        Pdag { p, parents, undirected }
    }

    pub fn from_dag(g: &Dag) -> Self {
        Pdag { p: g.p(), parents: g.parent_masks().to_vec(), undirected: vec![0; g.p()] }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn parents_mask(&self, node: usize) -> u64 {
        self.parents[node]
    }

    pub fn undirected_mask(&self, node: usize) -> u64 {
        self.undirected[node]
    }

    pub fn adjacency_mask(&self, node: usize) -> u64 {
        self.parents[node] | self.children_mask(node) | self.undirected[node]
    }

    pub fn children_mask(&self, node: usize) -> u64 {
        let mut mask = 0;
        for (j, &pa) in self.parents.iter().enumerate() {
            if pa & bit(node) != 0 {
                mask |= bit(j);
            }
        }
        mask
    }

    pub fn has_directed(&self, from: usize, to: usize) -> bool {
        self.parents[to] & bit(from) != 0
    }

    pub fn has_undirected(&self, a: usize, b: usize) -> bool {
        self.undirected[a] & bit(b) != 0
    }

    pub fn is_adjacent(&self, a: usize, b: usize) -> bool {
        self.has_directed(a, b) || self.has_directed(b, a) || self.has_undirected(a, b)
    }

    pub fn directed_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for from in 0..self.p {
            for to in 0..self.p {
                if self.parents[to] & bit(from) != 0 {
                    out.push((from, to));
                }
            }
        }
        out
    }

    /// Undirected edges as `(a, b)` with `a < b`, lexicographic.
    pub fn undirected_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.p {
            for b in iter_bits(self.undirected[a]) {
                if a < b {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn num_directed(&self) -> usize {
        self.parents.iter().map(|m| m.count_ones() as usize).sum()
    }

    pub fn num_undirected(&self) -> usize {
        self.undirected.iter().map(|m| m.count_ones() as usize).sum::<usize>() / 2
    }

    pub fn skeleton(&self) -> Vec<u64> {
        (0..self.p).map(|i| self.adjacency_mask(i)).collect()
    }

    /// Colliders formed by the directed part alone.
    pub fn v_structures(&self) -> Vec<(usize, usize, usize)> {
        v_structures_from(&self.parents, &self.skeleton())
    }

    /// The graph as a DAG, if every edge is directed and the result is acyclic.
    pub fn to_dag(&self) -> Option<Dag> {
        if self.undirected.iter().any(|&m| m != 0) {
            return None;
        }
        Dag::from_parent_masks(self.p, self.parents.clone()).ok()
    }

    pub(crate) fn orient(&mut self, from: usize, to: usize) {
        debug_assert!(self.has_undirected(from, to));
        self.undirected[from] &= !bit(to);
        self.undirected[to] &= !bit(from);
        self.parents[to] |= bit(from);
    }

    /// Applies Meek's four orientation rules until nothing changes.
    ///
    /// Fails when the directed part is (or becomes) cyclic, which means the
    /// input admits no consistent DAG extension.
    pub fn meek_closure(&self) -> Result<Pdag> {
        let mut g = self.clone();
        if directed_cycle(&g.parents) {
            return Err(Error::Inconsistent("directed part contains a cycle".into()));
        }
        loop {
            let mut changed = false;
            for a in 0..g.p {
                for b in iter_bits(g.undirected[a]) {
                    if g.undirected[a] & bit(b) != 0 && g.meek_orients(a, b) {
                        g.orient(a, b);
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        if directed_cycle(&g.parents) {
            return Err(Error::Inconsistent("Meek propagation produced a directed cycle".into()));
        }
        Ok(g)
    }

    /// Whether any Meek rule forces the undirected edge `a – b` into `a → b`.
    fn meek_orients(&self, a: usize, b: usize) -> bool {
        let adj_b = self.adjacency_mask(b);
        // R1: c → a – b, c and b non-adjacent.
        if self.parents[a] & !adj_b & !bit(b) != 0 {
            return true;
        }
        // R2: a → c → b.
        if self.children_mask(a) & self.parents[b] != 0 {
            return true;
        }
        // R3: a – c → b and a – d → b with c, d non-adjacent.
        let cands = self.undirected[a] & self.parents[b];
        for c in iter_bits(cands) {
            if cands & !bit(c) & !self.adjacency_mask(c) != 0 {
                return true;
            }
        }
        // R4: a – c → d → b with c, b non-adjacent and a, d adjacent.
        let adj_a = self.adjacency_mask(a);
        for c in iter_bits(self.undirected[a] & !adj_b & !bit(b)) {
            if self.children_mask(c) & self.parents[b] & adj_a != 0 {
                return true;
            }
        }
        false
    }
}

pub(crate) fn directed_cycle(parents: &[u64]) -> bool {
    let p = parents.len();
    let mut remaining = parents.to_vec();
    let mut placed = 0u64;
    for _ in 0..p {
        match (0..p).find(|&i| placed & bit(i) == 0 && remaining[i] == 0) {
            Some(next) => {
                placed |= bit(next);
                for r in remaining.iter_mut() {
                    *r &= !bit(next);
                }
            }
            None => return true,
        }
    }
    false
}

impl fmt::Debug for Pdag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pdag(p={}, directed={:?}, undirected={:?})", self.p, self.directed_edges(), self.undirected_edges())
    }
}
