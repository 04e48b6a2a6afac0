use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{iter_bits, Dag};

/// A quantity of interest computed from a DAG.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TargetFunctional {
    /// The whole graph.
    FullGraph,
    /// Whether the directed edge `i → j` is present.
    EdgePresence(usize, usize),
    /// Orientation of the pair `{i, j}`: forward, backward or absent.
    EdgeOrientation(usize, usize),
    /// Descendants of a node (excluding itself).
    DescendantSet(usize),
    /// Parents of a node.
    ParentSet(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Forward,
    Backward,
    Absent,
}

/// The value of a functional on one DAG.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FunctionalValue {
    Graph(Vec<u64>),
    Bool(bool),
    Orientation(Orientation),
    NodeSet(u64),
}

impl fmt::Display for FunctionalValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionalValue::Graph(parents) => {
                let edges: Vec<String> = parents
                    .iter()
                    .enumerate()
                    .flat_map(|(j, &m)| iter_bits(m).map(move |i| format!("{i}->{j}")))
                    .collect();
                write!(f, "[{}]", edges.join(","))
            }
            FunctionalValue::Bool(b) => write!(f, "{b}"),
            FunctionalValue::Orientation(o) => write!(f, "{o:?}"),
            FunctionalValue::NodeSet(m) => {
                let nodes: Vec<String> = iter_bits(*m).map(|i| i.to_string()).collect();
                write!(f, "{{{}}}", nodes.join(","))
            }
        }
    }
}

impl TargetFunctional {
    pub fn evaluate(&self, g: &Dag) -> FunctionalValue {
        match *self {
            TargetFunctional::FullGraph => FunctionalValue::Graph(g.parent_masks().to_vec()),
            TargetFunctional::EdgePresence(i, j) => FunctionalValue::Bool(g.has_edge(i, j)),
            TargetFunctional::EdgeOrientation(i, j) => FunctionalValue::Orientation(if g.has_edge(i, j) {
                Orientation::Forward
            } else if g.has_edge(j, i) {
                Orientation::Backward
            } else {
                Orientation::Absent
            }),
            TargetFunctional::DescendantSet(i) => FunctionalValue::NodeSet(g.descendants_mask(i)),
            TargetFunctional::ParentSet(i) => FunctionalValue::NodeSet(g.parents_mask(i)),
        }
    }

    pub fn validate(&self, p: usize) -> Result<()> {
        let nodes: &[usize] = match self {
            TargetFunctional::FullGraph => &[],
            TargetFunctional::EdgePresence(i, j) | TargetFunctional::EdgeOrientation(i, j) => {
                if i == j {
                    return Err(Error::InvalidConfig(format!("functional {self} needs two distinct nodes")));
                }
                &[*i, *j]
            }
            TargetFunctional::DescendantSet(i) | TargetFunctional::ParentSet(i) => std::slice::from_ref(i),
        };
        match nodes.iter().find(|&&n| n >= p) {
            Some(&node) => Err(Error::NodeOutOfRange { node, p }),
            None => Ok(()),
        }
    }

    /// Parses `full`, `edge:i,j`, `orient:i,j`, `desc:i` or `parents:i`.
    pub fn parse(spec: &str, p: usize) -> Result<Self> {
        let f: TargetFunctional = spec.parse()?;
        f.validate(p)?;
        Ok(f)
    }
}

impl FromStr for TargetFunctional {
    type Err = Error;

    fn from_str(spec: &str) -> Result<Self> {
        let bad = || Error::InvalidConfig(format!("bad functional {spec:?}; expected full | edge:i,j | orient:i,j | desc:i | parents:i"));
        let spec = spec.trim();
        if spec == "full" {
            return Ok(TargetFunctional::FullGraph);
        }
        let (kind, args) = spec.split_once(':').ok_or_else(bad)?;
        let nums: Vec<usize> = args.split(',').map(|s| s.trim().parse()).collect::<std::result::Result<_, _>>().map_err(|_| bad())?;
        match (kind.trim(), nums.as_slice()) {
            ("edge", &[i, j]) => Ok(TargetFunctional::EdgePresence(i, j)),
            ("orient", &[i, j]) => Ok(TargetFunctional::EdgeOrientation(i, j)),
            ("desc", &[i]) => Ok(TargetFunctional::DescendantSet(i)),
            ("parents", &[i]) => Ok(TargetFunctional::ParentSet(i)),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for TargetFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TargetFunctional::FullGraph => write!(f, "full"),
            TargetFunctional::EdgePresence(i, j) => write!(f, "edge:{i},{j}"),
            TargetFunctional::EdgeOrientation(i, j) => write!(f, "orient:{i},{j}"),
            TargetFunctional::DescendantSet(i) => write!(f, "desc:{i}"),
            TargetFunctional::ParentSet(i) => write!(f, "parents:{i}"),
        }
    }
}

impl Serialize for TargetFunctional {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TargetFunctional {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Functional values of a list of DAGs, interned: `class[i]` indexes into
/// `values`, in order of first appearance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionalClasses {
    pub class: Vec<usize>,
    pub values: Vec<FunctionalValue>,
}

impl FunctionalClasses {
    pub fn new(dags: &[Dag], f: TargetFunctional) -> Self {
        let mut index: HashMap<FunctionalValue, usize> = HashMap::new();
        let mut values = Vec::new();
        let class = dags
            .iter()
            .map(|g| {
                let v = f.evaluate(g);
                *index.entry(v.clone()).or_insert_with(|| {
                    values.push(v);
                    values.len() - 1
                })
            })
            .collect();
        FunctionalClasses { class, values }
    }

    pub fn num_values(&self) -> usize {
        self.values.len()
    }

    /// Mass per value under `weights` (one weight per DAG).
    pub fn masses(&self, weights: &[f64]) -> Vec<f64> {
        let mut mass = vec![0.0; self.values.len()];
        for (&c, &w) in self.class.iter().zip(weights) {
            mass[c] += w;
        }
        mass
    }

    /// Entropy in bits of the functional under `weights`, renormalized so
    /// rounding in the weights cannot leak into a point mass.
    pub fn entropy(&self, weights: &[f64]) -> f64 {
        let mut mass = self.masses(weights);
        let total: f64 = mass.iter().sum();
        if total > 0.0 {
            for m in &mut mass {
                *m /= total;
            }
        }
        entropy_bits(&mass)
    }
}

/// Shannon entropy in bits, with `0 log 0 = 0`.
pub fn entropy_bits(probs: &[f64]) -> f64 {
    let h: f64 = probs.iter().filter(|&&q| q > 0.0).map(|&q| -q * q.log2()).sum();
    h.max(0.0)
}

/// Posterior distribution of a functional.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionalDistribution {
    pub support: Vec<FunctionalValue>,
    pub probs: Vec<f64>,
}

impl FunctionalDistribution {
    pub fn entropy(&self) -> f64 {
        entropy_bits(&self.probs)
    }

    pub fn prob_of(&self, value: &FunctionalValue) -> f64 {
        self.support.iter().position(|v| v == value).map_or(0.0, |k| self.probs[k])
    }

    /// Support sorted by decreasing probability (ties by value).
    pub fn sorted(&self) -> Vec<(&FunctionalValue, f64)> {
        let mut out: Vec<_> = self.support.iter().zip(self.probs.iter().copied()).collect();
        out.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        out
    }
}

pub fn entropy(dist: &FunctionalDistribution) -> f64 {
    dist.entropy()
}
