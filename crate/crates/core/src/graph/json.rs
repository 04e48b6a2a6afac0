use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Dag, Pdag};
use crate::error::{Error, Result};

/// Wire form shared by [`Dag`] and [`Pdag`]:
/// `{"p": 3, "directed": [[0,1]], "undirected": [[1,2]]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub p: usize,
    #[serde(default)]
    pub directed: Vec<[usize; 2]>,
    #[serde(default)]
    pub undirected: Vec<[usize; 2]>,
}

impl From<&Dag> for GraphJson {
    fn from(g: &Dag) -> Self {
        GraphJson { p: g.p(), directed: g.edges().into_iter().map(|(a, b)| [a, b]).collect(), undirected: Vec::new() }
    }
}

impl From<&Pdag> for GraphJson {
    fn from(g: &Pdag) -> Self {
        GraphJson {
            p: g.p(),
            directed: g.directed_edges().into_iter().map(|(a, b)| [a, b]).collect(),
            undirected: g.undirected_edges().into_iter().map(|(a, b)| [a, b]).collect(),
        }
    }
}

impl TryFrom<GraphJson> for Dag {
    type Error = Error;

    fn try_from(g: GraphJson) -> Result<Dag> {
        if !g.undirected.is_empty() {
            return Err(Error::InvalidGraph("a DAG cannot have undirected edges".into()));
        }
        let edges: Vec<_> = g.directed.iter().map(|&[a, b]| (a, b)).collect();
        Dag::new(g.p, &edges)
    }
}

impl TryFrom<GraphJson> for Pdag {
    type Error = Error;

    fn try_from(g: GraphJson) -> Result<Pdag> {
        let d: Vec<_> = g.directed.iter().map(|&[a, b]| (a, b)).collect();
        let u: Vec<_> = g.undirected.iter().map(|&[a, b]| (a, b)).collect();
        Pdag::new(g.p, &d, &u)
    }
}

impl Serialize for Dag {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GraphJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Dag {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Dag::try_from(GraphJson::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

impl Serialize for Pdag {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GraphJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Pdag {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Pdag::try_from(GraphJson::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dag_json_shape() {
        let g = Dag::new(3, &[(0, 1), (2, 1)]).unwrap();
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"{"p":3,"directed":[[0,1],[2,1]],"undirected":[]}"#);
        assert_eq!(serde_json::from_str::<Dag>(&s).unwrap(), g);
        assert!(serde_json::from_str::<Dag>(r#"{"p":2,"directed":[[0,1],[1,0]]}"#).is_err());
        assert!(serde_json::from_str::<Dag>(r#"{"p":2,"undirected":[[0,1]]}"#).is_err());
    }

    #[test]
    fn pdag_json_round_trip() {
        let g = Pdag::new(3, &[(0, 1)], &[(1, 2)]).unwrap();
        let back: Pdag = serde_json::from_str(&serde_json::to_string(&g).unwrap()).unwrap();
        assert_eq!(back, g);
    }
}
