//! Independent brute-force helpers shared by the integration tests. Nothing
//! here calls into the library's enumeration or closure code.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::OnceLock;

pub type Edges = BTreeSet<(usize, usize)>;

fn acyclic(p: usize, edges: &Edges) -> bool {
    // Depth-first search with colours.
    fn visit(u: usize, p: usize, edges: &Edges, colour: &mut [u8]) -> bool {
        colour[u] = 1;
        for v in 0..p {
            if edges.contains(&(u, v)) {
                if colour[v] == 1 || (colour[v] == 0 && !visit(v, p, edges, colour)) {
                    return false;
                }
            }
        }
        colour[u] = 2;
        true
    }
    let mut colour = vec![0u8; p];
    (0..p).all(|u| colour[u] != 0 || visit(u, p, edges, &mut colour))
}

/// Every DAG on `p` nodes as an edge set, by trying all 3^(p choose 2)
/// orientations and keeping the acyclic ones.
pub fn brute_dags(p: usize) -> &'static [Edges] {
    static CACHE: [OnceLock<Vec<Edges>>; 6] =
        [OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new()];
    CACHE[p].get_or_init(|| {
        let pairs: Vec<(usize, usize)> = (0..p).flat_map(|a| (a + 1..p).map(move |b| (a, b))).collect();
        let total = 3usize.pow(pairs.len() as u32);
        let mut out = Vec::new();
        for code in 0..total {
            let mut c = code;
            let mut edges = Edges::new();
            for &(a, b) in &pairs {
                match c % 3 {
                    1 => {
                        edges.insert((a, b));
                    }
                    2 => {
                        edges.insert((b, a));
                    }
                    _ => {}
                }
                c /= 3;
            }
            if acyclic(p, &edges) {
                out.push(edges);
            }
        }
        out
    })
}

pub fn skeleton(edges: &Edges) -> BTreeSet<(usize, usize)> {
    edges.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect()
}

pub fn v_structures(edges: &Edges) -> BTreeSet<(usize, usize, usize)> {
    let skel = skeleton(edges);
    let mut out = BTreeSet::new();
    for &(a, c) in edges {
        for &(b, c2) in edges {
            if c == c2 && a < b && !skel.contains(&(a, b)) {
                out.insert((a, b, c));
            }
        }
    }
    out
}

pub fn mutilated(edges: &Edges, target: &[usize]) -> Edges {
    edges.iter().copied().filter(|&(_, b)| !target.contains(&b)).collect()
}

/// Markov equivalence by the skeleton + colliders characterisation.
pub fn brute_mec(p: usize, g: &Edges) -> Vec<Edges> {
    let (s, v) = (skeleton(g), v_structures(g));
    brute_dags(p).iter().filter(|h| skeleton(h) == s && v_structures(h) == v).cloned().collect()
}

/// Edges oriented the same way in every member.
pub fn common_orientation(members: &[Edges]) -> Edges {
    let mut it = members.iter();
    let first = it.next().expect("non-empty").clone();
    it.fold(first, |acc, m| acc.intersection(m).copied().collect())
}

pub fn edges_of(g: &causal_design::graph::Dag) -> Edges {
    g.edges().into_iter().collect()
}

/// Deterministic pseudo-random DAG on `p` nodes: random permutation order,
/// each pair present with probability `density`.
pub fn random_dag(p: usize, density: f64, seed: u64) -> causal_design::graph::Dag {
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..p).collect();
    order.shuffle(&mut rng);
    let mut edges = Vec::new();
    for i in 0..p {
        for j in i + 1..p {
            if rng.random::<f64>() < density {
                edges.push((order[i], order[j]));
            }
        }
    }
    causal_design::graph::Dag::new(p, &edges).unwrap()
}

/// The member of the undirected path `0 - 1 - … - p-1` whose edges all point
/// away from `source`.
pub fn path_from_source(p: usize, source: usize) -> causal_design::graph::Dag {
    let mut edges = Vec::new();
    for i in 0..p - 1 {
        if i < source {
            edges.push((i + 1, i));
        } else {
            edges.push((i, i + 1));
        }
    }
    causal_design::graph::Dag::new(p, &edges).unwrap()
}

/// Four-node complete DAG with topological order 2, 0, 3, 1.
pub fn counterexample() -> causal_design::graph::Dag {
    causal_design::graph::Dag::new(4, &[(2, 0), (2, 1), (2, 3), (0, 1), (0, 3), (3, 1)]).unwrap()
}

/// Fits every DAG on observational data drawn from a unit-weight SCM over
/// `truth` and weights them uniformly.
pub fn uniform_ensemble(
    dags: Vec<causal_design::graph::Dag>,
    truth: &causal_design::graph::Dag,
    n: usize,
    seed: u64,
) -> causal_design::posterior::DagEnsemble {
    use causal_design::sem::{mle_fit, LinearGaussianScm, NoiseModel};
    let p = truth.p();
    let mut w = vec![0.0; p * p];
    for (k, (i, j)) in truth.edges().into_iter().enumerate() {
        w[i * p + j] = if k % 2 == 0 { 0.9 } else { -0.7 };
    }
    let scm = LinearGaussianScm::new(truth.clone(), w, vec![1.0; p]).unwrap();
    let d = scm.sample(causal_design::graph::InterventionTarget::OBSERVATIONAL, n, seed);
    let params = dags.iter().map(|g| mle_fit(g, &d, NoiseModel::Estimated).unwrap()).collect();
    let t = dags.len();
    causal_design::posterior::DagEnsemble::new(dags, vec![1.0 / t as f64; t], params).unwrap()
}
