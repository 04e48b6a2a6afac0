use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{InterventionFamily, InterventionTarget};

/// A multiset of intervention targets: how many samples to collect under each.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Design {
    counts: BTreeMap<InterventionTarget, usize>,
}

#[derive(Serialize, Deserialize)]
struct DesignEntry {
    target: InterventionTarget,
    count: usize,
}

impl Design {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_counts<I: IntoIterator<Item = (InterventionTarget, usize)>>(counts: I) -> Self {
        let mut d = Design::new();
        for (t, c) in counts {
            d.add(t, c);
        }
        d
    }

    pub fn add(&mut self, target: InterventionTarget, count: usize) {
        if count > 0 {
            *self.counts.entry(target).or_insert(0) += count;
        }
    }

    pub fn with(&self, target: InterventionTarget, count: usize) -> Design {
        let mut d = self.clone();
        d.add(target, count);
        d
    }

    pub fn count(&self, target: InterventionTarget) -> usize {
        self.counts.get(&target).copied().unwrap_or(0)
    }

    /// `|ξ|`, the total number of samples.
    pub fn size(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn num_unique(&self) -> usize {
        self.counts.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (InterventionTarget, usize)> + '_ {
        self.counts.iter().map(|(&t, &c)| (t, c))
    }

    pub fn targets(&self) -> impl Iterator<Item = InterventionTarget> + '_ {
        self.counts.keys().copied()
    }

    /// Componentwise `self ≤ other`.
    pub fn is_subdesign_of(&self, other: &Design) -> bool {
        self.iter().all(|(t, c)| other.count(t) >= c)
    }

    pub fn validate(&self, family: &InterventionFamily) -> Result<()> {
        match self.targets().find(|&t| !family.contains(t)) {
            Some(t) => Err(Error::InvalidFamily(format!("design target {t} is not in the family"))),
            None => Ok(()),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("design serialises")
    }
}

impl fmt::Display for Design {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|(t, c)| format!("{t}x{c}")).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

impl Serialize for Design {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let entries: Vec<DesignEntry> = self.iter().map(|(target, count)| DesignEntry { target, count }).collect();
        entries.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Design {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let entries = Vec::<DesignEntry>::deserialize(d)?;
        Ok(Design::from_counts(entries.into_iter().map(|e| (e.target, e.count))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_form() {
        let d = Design::from_counts([(InterventionTarget::single(2), 3), (InterventionTarget::OBSERVATIONAL, 1)]);
        let s = serde_json::to_string(&d).unwrap();
        assert_eq!(s, r#"[{"target":"","count":1},{"target":"2","count":3}]"#);
        assert_eq!(serde_json::from_str::<Design>(&s).unwrap(), d);
        assert_eq!(d.size(), 4);
    }

    #[test]
    fn zero_counts_are_dropped() {
        let d = Design::from_counts([(InterventionTarget::single(0), 0)]);
        assert!(d.is_empty());
    }

    #[test]
    fn subdesign_order() {
        let a = Design::from_counts([(InterventionTarget::single(0), 1)]);
        let b = a.with(InterventionTarget::single(1), 2);
        assert!(a.is_subdesign_of(&b));
        assert!(!b.is_subdesign_of(&a));
    }
}
