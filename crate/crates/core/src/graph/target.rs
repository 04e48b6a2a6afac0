use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{check_nodes, MAX_NODES};
use crate::error::{Error, Result};

/// A set of intervened nodes; the empty set is the observational regime.
///
/// Stored as a bitmask, so graphs are limited to [`MAX_NODES`] nodes.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InterventionTarget(u64);

impl InterventionTarget {
    pub const OBSERVATIONAL: InterventionTarget = InterventionTarget(0);

    pub fn new<I: IntoIterator<Item = usize>>(nodes: I) -> Result<Self> {
        let mut bits = 0u64;
        for node in nodes {
            if node >= MAX_NODES {
                return Err(Error::NodeOutOfRange { node, p: MAX_NODES });
            }
            bits |= 1 << node;
        }
        Ok(InterventionTarget(bits))
    }

    pub fn single(node: usize) -> Self {
        assert!(node < MAX_NODES, "node {node} out of range");
        InterventionTarget(1 << node)
    }

    pub fn from_bits(bits: u64) -> Self {
        InterventionTarget(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn is_observational(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, node: usize) -> bool {
        node < MAX_NODES && self.0 >> node & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn nodes(self) -> impl Iterator<Item = usize> {
        super::iter_bits(self.0)
    }

    /// Largest node index plus one, or 0 for the empty target.
    pub fn span(self) -> usize {
        MAX_NODES - self.0.leading_zeros() as usize
    }

    /// Node list as written in data files and design JSON: `"0;3;4"`, `""` for
    /// observational.
    pub fn encode(self) -> String {
        self.nodes()
            .map(|n| n.to_string())
            .collect::<Vec<_>>()
            .join(";")
    }

    /// Same as [`encode`](Self::encode) but with 1-based labels in braces, for
    /// human-facing tables.
    pub fn label_one_based(self) -> String {
        let inner = self
            .nodes()
            .map(|n| (n + 1).to_string())
            .collect::<Vec<_>>()
            .join(",");
        format!("{{{inner}}}")
    }

    pub fn validate(self, p: usize) -> Result<()> {
        check_nodes(self.nodes(), p)
    }
}

impl fmt::Debug for InterventionTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, n) in self.nodes().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Display for InterventionTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for InterventionTarget {
    type Err = Error;

    /// Parses the semicolon form used in data files (`""`, `"3"`, `"0;2"`).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(InterventionTarget::OBSERVATIONAL);
        }
        let nodes = s
            .split(';')
            .map(|tok| {
                tok.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidData(format!("bad node index {tok:?} in target {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        InterventionTarget::new(nodes)
    }
}

impl Serialize for InterventionTarget {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.encode())
    }
}

impl<'de> Deserialize<'de> for InterventionTarget {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The admissible intervention targets, in declaration order.
///
/// Construction enforces distinct targets and conservativity: every node is
/// left untouched by at least one target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterventionFamily {
    p: usize,
    targets: Vec<InterventionTarget>,
}

impl InterventionFamily {
    pub fn new(p: usize, targets: Vec<InterventionTarget>) -> Result<Self> {
        if targets.is_empty() {
            return Err(Error::InvalidFamily("family has no targets".into()));
        }
        for (k, t) in targets.iter().enumerate() {
            t.validate(p)?;
            if targets[..k].contains(t) {
                return Err(Error::InvalidFamily(format!("duplicate target {t}")));
            }
        }
        for node in 0..p {
            if targets.iter().all(|t| t.contains(node)) {
                return Err(Error::NotConservative { node });
            }
        }
        Ok(InterventionFamily { p, targets })
    }

    /// All single-node targets `{0}, …, {p-1}`.
    pub fn singles(p: usize) -> Result<Self> {
        Self::new(p, (0..p).map(InterventionTarget::single).collect())
    }

    /// `{∅} ∪ targets`, which is conservative for any choice of targets.
    pub fn with_observational(p: usize, targets: &[InterventionTarget]) -> Result<Self> {
        let mut all = vec![InterventionTarget::OBSERVATIONAL];
        for &t in targets {
            if !all.contains(&t) {
                all.push(t);
            }
        }
        Self::new(p, all)
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn targets(&self) -> &[InterventionTarget] {
        &self.targets
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn contains(&self, target: InterventionTarget) -> bool {
        self.targets.contains(&target)
    }

    pub fn position(&self, target: InterventionTarget) -> Option<usize> {
        self.targets.iter().position(|&t| t == target)
    }

    /// Parses the CLI mini-language: `singles`, or an explicit list such as
    /// `{0};{1,2}` (an empty pair of braces is the observational target).
    pub fn parse_spec(spec: &str, p: usize) -> Result<Self> {
        let spec = spec.trim();
        if spec.eq_ignore_ascii_case("singles") {
            return Self::singles(p);
        }
        let mut targets = Vec::new();
        for part in spec.split(';') {
            let part = part.trim();
            let inner = part
                .strip_prefix('{')
                .and_then(|s| s.strip_suffix('}'))
                .ok_or_else(|| Error::InvalidFamily(format!("expected {{…}} around target, got {part:?}")))?;
            let nodes = inner
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<usize>()
                        .map_err(|_| Error::InvalidFamily(format!("bad node index {s:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            targets.push(InterventionTarget::new(nodes)?);
        }
        Self::new(p, targets)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encode_round_trip() {
        let t = InterventionTarget::new([4, 0, 2]).unwrap();
        assert_eq!(t.encode(), "0;2;4");
        assert_eq!("0;2;4".parse::<InterventionTarget>().unwrap(), t);
        assert_eq!("".parse::<InterventionTarget>().unwrap(), InterventionTarget::OBSERVATIONAL);
        assert_eq!(t.label_one_based(), "{1,3,5}");
        assert!("0;x".parse::<InterventionTarget>().is_err());
    }

    #[test]
    fn conservativity_is_enforced() {
        let all = InterventionTarget::new([0, 1]).unwrap();
        assert!(matches!(
            InterventionFamily::new(2, vec![all]),
            Err(Error::NotConservative { node: 0 })
        ));
        assert!(InterventionFamily::new(2, vec![InterventionTarget::single(0)]).is_err());
        assert!(InterventionFamily::singles(3).is_ok());
        assert!(InterventionFamily::with_observational(2, &[all]).is_ok());
    }

    #[test]
    fn rejects_duplicates_and_out_of_range() {
        let t = InterventionTarget::single(0);
        assert!(InterventionFamily::new(3, vec![t, t]).is_err());
        assert!(InterventionFamily::new(2, vec![InterventionTarget::single(5)]).is_err());
    }

    #[test]
    fn parses_family_specs() {
        let fam = InterventionFamily::parse_spec("{0};{1,2}", 3).unwrap();
        assert_eq!(fam.targets()[1], InterventionTarget::new([1, 2]).unwrap());
        assert_eq!(InterventionFamily::parse_spec("singles", 4).unwrap().len(), 4);
        let with_obs = InterventionFamily::parse_spec("{};{0}", 2).unwrap();
        assert!(with_obs.targets()[0].is_observational());
        assert!(InterventionFamily::parse_spec("0;1", 2).is_err());
    }
}
