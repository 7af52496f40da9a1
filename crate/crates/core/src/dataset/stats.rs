use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::examples::{IntervalExample, PointExample};
use crate::algebra::{AllenRelation, EndpointPairKey, PointRelation};

/// Counts keyed by endpoint pair and point relation, in `<`, `=`, `>` order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PointStats {
    pub counts: [[usize; 3]; 4],
}

impl PointStats {
    pub fn get(&self, key: EndpointPairKey, rel: PointRelation) -> usize {
        self.counts[key.index()][rel.index()]
    }

    pub fn add(&mut self, key: EndpointPairKey, rel: PointRelation) {
        self.counts[key.index()][rel.index()] += 1;
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn relation_total(&self, rel: PointRelation) -> usize {
        self.counts.iter().map(|row| row[rel.index()]).sum()
    }
}

impl Serialize for PointStats {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let table: BTreeMap<&str, BTreeMap<&str, usize>> = EndpointPairKey::ALL
            .iter()
            .map(|&k| {
                let row = PointRelation::ALL.iter().map(|&r| (r.symbol(), self.get(k, r))).collect();
                (k.as_str(), row)
            })
            .collect();
        table.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PointStats {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let table = BTreeMap::<EndpointPairKey, BTreeMap<PointRelation, usize>>::deserialize(deserializer)?;
        let mut stats = PointStats::default();
        for (k, row) in table {
            for (r, n) in row {
                stats.counts[k.index()][r.index()] = n;
            }
        }
        Ok(stats)
    }
}

impl fmt::Display for PointStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<4}{:>9}{:>9}{:>9}", "", "<", "=", ">")?;
        for key in EndpointPairKey::ALL {
            write!(f, "{:<4}", key.as_str())?;
            for rel in PointRelation::ALL {
                write!(f, "{:>9}", self.get(key, rel))?;
            }
            writeln!(f)?;
        }
        write!(f, "total {}", self.total())
    }
}

/// Label histogram of an interval dataset.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalStats {
    pub counts: BTreeMap<AllenRelation, usize>,
}

impl IntervalStats {
    pub fn get(&self, rel: AllenRelation) -> usize {
        self.counts.get(&rel).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }
}

impl fmt::Display for IntervalStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for rel in AllenRelation::ALL {
            writeln!(f, "{:<14}{:>9}", rel.as_str(), self.get(rel))?;
        }
        write!(f, "total {}", self.total())
    }
}

pub fn dataset_stats(examples: &[PointExample]) -> PointStats {
    let mut stats = PointStats::default();
    for e in examples {
        stats.add(e.pair_key, e.relation);
    }
    stats
}

pub fn interval_stats(examples: &[IntervalExample]) -> IntervalStats {
    let mut stats = IntervalStats::default();
    for e in examples {
        *stats.counts.entry(e.relation).or_default() += 1;
    }
    stats
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{PointEndpoint, Side};
    use crate::dataset::{augment_inverse, Provenance};

    #[test]
    fn empty_is_zero() {
        assert_eq!(dataset_stats(&[]), PointStats::default());
        assert_eq!(interval_stats(&[]).total(), 0);
    }

    #[test]
    fn inverse_counts_add_mirrored_cells() {
        let docs = crate::synth::generate_documents(&crate::synth::SynthConfig { seed: 4, ..Default::default() });
        let raw = crate::dataset::intervals_to_points(&docs);
        let before = dataset_stats(&raw);
        let after = dataset_stats(&augment_inverse(&raw));
        for key in EndpointPairKey::ALL {
            for rel in PointRelation::ALL {
                assert_eq!(
                    after.get(key, rel),
                    before.get(key, rel) + before.get(key.swapped(), rel.invert()),
                    "{key:?} {rel:?}"
                );
            }
        }
    }

    #[test]
    fn serde_round_trip() {
        let e = PointExample::new(
            "d",
            PointEndpoint::new("a", Side::End),
            PointRelation::Equal,
            PointEndpoint::new("b", Side::Start),
            Provenance::Annotated,
        );
        let stats = dataset_stats(&[e.clone(), e]);
        let json = serde_json::to_value(stats).unwrap();
        assert_eq!(json["ES"]["="], 2);
        assert_eq!(serde_json::from_value::<PointStats>(json).unwrap(), stats);
        assert!(stats.to_string().contains("ES"));
    }
}
