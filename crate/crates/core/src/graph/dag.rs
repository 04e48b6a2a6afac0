use std::fmt;

use super::{bit, check_nodes, check_p, iter_bits, InterventionTarget, Pdag};
use crate::error::{Error, Result};

/// A directed acyclic graph on nodes `0..p`.
///
/// `parents[j]` has bit `i` set iff `i → j`. The derived ordering (by `p`,
/// then parent masks) is only used for deterministic sorting and grouping.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dag {
    p: usize,
    parents: Vec<u64>,
}

impl Dag {
    pub fn new(p: usize, edges: &[(usize, usize)]) -> Result<Self> {
        check_p(p)?;
        let mut parents = vec![0u64; p];
        for &(from, to) in edges {
            check_nodes([from, to], p)?;
            if from == to {
                return Err(Error::InvalidGraph(format!("self-loop at node {from}")));
            }
            if parents[to] & bit(from) != 0 {
                return Err(Error::InvalidGraph(format!("duplicate edge {from}->{to}")));
            }
            if parents[from] & bit(to) != 0 {
                return Err(Error::InvalidGraph(format!("both {from}->{to} and {to}->{from} present")));
            }
            parents[to] |= bit(from);
        }
        Self::from_parent_masks(p, parents)
    }

    pub fn empty(p: usize) -> Result<Self> {
        check_p(p)?;
        Ok(Dag { p, parents: vec![0; p] })
    }

    /// Builds a DAG from parent bitmasks, rejecting cycles and self-loops.
    pub fn from_parent_masks(p: usize, parents: Vec<u64>) -> Result<Self> {
        check_p(p)?;
        if parents.len() != p {
            return Err(Error::InvalidGraph(format!("expected {p} parent masks, got {}", parents.len())));
        }
        let valid = if p == 64 { u64::MAX } else { bit(p) - 1 };
        for (j, &mask) in parents.iter().enumerate() {
            if mask & !valid != 0 {
                return Err(Error::NodeOutOfRange { node: (mask & !valid).trailing_zeros() as usize, p });
            }
            if mask & bit(j) != 0 {
                return Err(Error::InvalidGraph(format!("self-loop at node {j}")));
            }
        }
        let g = Dag { p, parents };
        if let Some((from, to)) = g.find_cycle_edge() {
            return Err(Error::Cycle { from, to });
        }
        Ok(g)
    }

    pub(crate) fn from_parent_masks_unchecked(p: usize, parents: Vec<u64>) -> Self {
        debug_assert!(Dag::from_parent_masks(p, parents.clone()).is_ok());
        Dag { p, parents }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn parents_mask(&self, node: usize) -> u64 {
        self.parents[node]
    }

    pub fn parent_masks(&self) -> &[u64] {
        &self.parents
    }

    pub fn parents(&self, node: usize) -> Vec<usize> {
        iter_bits(self.parents[node]).collect()
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

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        from < self.p && to < self.p && self.parents[to] & bit(from) != 0
    }

    pub fn is_adjacent(&self, a: usize, b: usize) -> bool {
        self.has_edge(a, b) || self.has_edge(b, a)
    }

    pub fn num_edges(&self) -> usize {
        self.parents.iter().map(|m| m.count_ones() as usize).sum()
    }

    /// Edges `(from, to)` in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut edges = Vec::with_capacity(self.num_edges());
        for from in 0..self.p {
            for to in 0..self.p {
                if self.parents[to] & bit(from) != 0 {
                    edges.push((from, to));
                }
            }
        }
        edges
    }

    /// Symmetric adjacency masks.
    pub fn skeleton(&self) -> Vec<u64> {
        let mut adj = self.parents.clone();
        for (j, &pa) in self.parents.iter().enumerate() {
            for i in iter_bits(pa) {
                adj[i] |= bit(j);
            }
        }
        adj
    }

    /// Unshielded colliders `a → c ← b` with `a < b` and `a`, `b` non-adjacent,
    /// sorted by `(a, b, c)`.
    pub fn v_structures(&self) -> Vec<(usize, usize, usize)> {
        let adj = self.skeleton();
        v_structures_from(&self.parents, &adj)
    }

    /// Kahn's algorithm, always releasing the smallest available node first.
    pub fn topological_order(&self) -> Vec<usize> {
        let mut remaining: Vec<u64> = self.parents.clone();
        let mut placed = 0u64;
        let mut order = Vec::with_capacity(self.p);
        while order.len() < self.p {
            let next = (0..self.p)
                .find(|&i| placed & bit(i) == 0 && remaining[i] == 0)
                .expect("Dag invariant: acyclic");
            placed |= bit(next);
            order.push(next);
            for r in remaining.iter_mut() {
                *r &= !bit(next);
            }
        }
        order
    }

    pub fn descendants_mask(&self, node: usize) -> u64 {
        let children: Vec<u64> = (0..self.p).map(|i| self.children_mask(i)).collect();
        let mut seen = 0u64;
        let mut frontier = children[node];
        while frontier != 0 {
            let i = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            if seen & bit(i) == 0 {
                seen |= bit(i);
                frontier |= children[i] & !seen;
            }
        }
        seen
    }

    pub fn ancestors_mask(&self, node: usize) -> u64 {
        let mut seen = 0u64;
        let mut frontier = self.parents[node];
        while frontier != 0 {
            let i = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            if seen & bit(i) == 0 {
                seen |= bit(i);
                frontier |= self.parents[i] & !seen;
            }
        }
        seen
    }

    /// Removes every edge pointing into a node of `target`.
    pub fn mutilate(&self, target: InterventionTarget) -> Dag {
        let parents = self
            .parents
            .iter()
            .enumerate()
            .map(|(j, &pa)| if target.contains(j) { 0 } else { pa })
            .collect();
        Dag { p: self.p, parents }
    }

    /// Skeleton of the mutilated graph without materialising it.
    pub(crate) fn mutilated_skeleton(&self, target: InterventionTarget) -> Vec<u64> {
        let mut adj = vec![0u64; self.p];
        for (j, &pa) in self.parents.iter().enumerate() {
            if target.contains(j) {
                continue;
            }
            for i in iter_bits(pa) {
                adj[i] |= bit(j);
                adj[j] |= bit(i);
            }
        }
        adj
    }

    /// An edge `i → j` is covered when `Pa(j) = Pa(i) ∪ {i}`.
    pub fn is_covered(&self, from: usize, to: usize) -> bool {
        self.has_edge(from, to) && self.parents[to] == self.parents[from] | bit(from)
    }

    /// Returns the graph with `from → to` replaced by `to → from`, or `None`
    /// when the edge is absent or the reversal creates a cycle.
    pub fn reversed(&self, from: usize, to: usize) -> Option<Dag> {
        if !self.has_edge(from, to) {
            return None;
        }
        let mut parents = self.parents.clone();
        parents[to] &= !bit(from);
        parents[from] |= bit(to);
        Dag::from_parent_masks(self.p, parents).ok()
    }

    pub fn cpdag(&self) -> Pdag {
        let mut compelled = vec![0u64; self.p];
        for (a, b, c) in self.v_structures() {
            compelled[c] |= bit(a) | bit(b);
        }
        let adj = self.skeleton();
        let mut undirected = vec![0u64; self.p];
        for (j, &pa) in self.parents.iter().enumerate() {
            for i in iter_bits(pa & !compelled[j]) {
                undirected[i] |= bit(j);
                undirected[j] |= bit(i);
            }
        }
        debug_assert!(adj.iter().zip(&undirected).all(|(a, u)| a & u == *u));
        Pdag::from_masks(self.p, compelled, undirected)
            .meek_closure()
            .expect("the CPDAG skeleton of a DAG always has a consistent extension")
    }

    fn find_cycle_edge(&self) -> Option<(usize, usize)> {
        let mut remaining = self.parents.clone();
        let mut placed = 0u64;
        for _ in 0..self.p {
            let Some(next) = (0..self.p).find(|&i| placed & bit(i) == 0 && remaining[i] == 0) else {
                break;
            };
            placed |= bit(next);
            for r in remaining.iter_mut() {
                *r &= !bit(next);
            }
        }
        if placed.count_ones() as usize == self.p {
            None
        } else {
            (0..self.p)
                .find(|&j| placed & bit(j) == 0)
                .map(|j| (remaining[j].trailing_zeros() as usize, j))
        }
    }
}

pub(crate) fn v_structures_from(parents: &[u64], adj: &[u64]) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for (c, &pa) in parents.iter().enumerate() {
        for a in iter_bits(pa) {
            for b in iter_bits(pa & !(bit(a) << 1).wrapping_sub(1)) {
                if adj[a] & bit(b) == 0 {
                    out.push((a, b, c));
                }
            }
        }
    }
    out.sort_unstable();
    out
}

impl fmt::Debug for Dag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dag(p={}, [", self.p)?;
        for (k, (i, j)) in self.edges().into_iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{i}->{j}")?;
        }
        write!(f, "])")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(p: usize) -> Dag {
        let edges: Vec<_> = (0..p - 1).map(|i| (i, i + 1)).collect();
        Dag::new(p, &edges).unwrap()
    }

    #[test]
    fn rejects_cycles_self_loops_and_duplicates() {
        assert!(matches!(Dag::new(3, &[(0, 1), (1, 2), (2, 0)]), Err(Error::Cycle { .. })));
        assert!(Dag::new(2, &[(0, 0)]).is_err());
        assert!(Dag::new(2, &[(0, 1), (0, 1)]).is_err());
        assert!(Dag::new(2, &[(0, 1), (1, 0)]).is_err());
        assert!(Dag::new(2, &[(0, 2)]).is_err());
        assert!(Dag::new(0, &[]).is_err());
    }

    #[test]
    fn topological_order_examples() {
        assert_eq!(chain(3).topological_order(), vec![0, 1, 2]);
        assert_eq!(Dag::empty(3).unwrap().topological_order(), vec![0, 1, 2]);
        let g = Dag::new(3, &[(2, 0), (1, 0)]).unwrap();
        assert_eq!(g.topological_order(), vec![1, 2, 0]);
    }

    #[test]
    fn descendants_examples() {
        let g = chain(3);
        assert_eq!(super::super::descendants(&g, 0), vec![1, 2]);
        assert!(super::super::descendants(&g, 2).is_empty());
    }

    #[test]
    fn mutilation_removes_incoming_edges_only() {
        let g = chain(3);
        let m = g.mutilate(InterventionTarget::single(1));
        assert_eq!(m.edges(), vec![(1, 2)]);
        assert_eq!(g.mutilate(InterventionTarget::OBSERVATIONAL), g);
    }

    #[test]
    fn v_structures_and_covered_edges() {
        let collider = Dag::new(3, &[(0, 2), (1, 2)]).unwrap();
        assert_eq!(collider.v_structures(), vec![(0, 1, 2)]);
        let shielded = Dag::new(3, &[(0, 2), (1, 2), (0, 1)]).unwrap();
        assert!(shielded.v_structures().is_empty());
        assert!(shielded.is_covered(0, 1));
        assert!(shielded.is_covered(1, 2));
        assert!(!shielded.is_covered(0, 2));
    }

    #[test]
    fn reversal_rejects_cycles() {
        let g = Dag::new(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(g.reversed(0, 2).is_none());
        assert!(g.reversed(0, 1).is_some());
        assert!(g.reversed(1, 0).is_none());
    }
}
