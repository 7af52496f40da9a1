use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{AllenRelation, EndpointPairKey, EntityId, PointEndpoint, PointRelation, PointStatement};
use crate::corpus::Document;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Annotated,
    Inverse,
    Closure,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Annotated => "annotated",
            Provenance::Inverse => "inverse",
            Provenance::Closure => "closure",
        })
    }
}

/// One point-relation training example. `source` plays the role of `x`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PointExample {
    pub doc_id: String,
    pub source: PointEndpoint,
    pub target: PointEndpoint,
    pub relation: PointRelation,
    pub pair_key: EndpointPairKey,
    pub provenance: Provenance,
}

impl PointExample {
    pub fn new(
        doc_id: impl Into<String>,
        source: PointEndpoint,
        relation: PointRelation,
        target: PointEndpoint,
        provenance: Provenance,
    ) -> Self {
        let pair_key = EndpointPairKey::new(source.side, target.side);
        PointExample { doc_id: doc_id.into(), source, target, relation, pair_key, provenance }
    }

    pub fn statement(&self) -> PointStatement {
        PointStatement::new(self.source.clone(), self.relation, self.target.clone())
    }

    /// Swapped endpoints with the relation inverted; provenance is kept.
    pub fn flipped(&self) -> Self {
        PointExample::new(
            self.doc_id.clone(),
            self.target.clone(),
            self.relation.invert(),
            self.source.clone(),
            self.provenance,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntervalExample {
    pub doc_id: String,
    pub source: EntityId,
    pub target: EntityId,
    pub relation: AllenRelation,
    pub provenance: Provenance,
}

impl IntervalExample {
    pub fn flipped(&self) -> Self {
        IntervalExample {
            doc_id: self.doc_id.clone(),
            source: self.target.clone(),
            target: self.source.clone(),
            relation: self.relation.invert(),
            provenance: self.provenance,
        }
    }
}

/// Annotated interval examples of `docs`, one per TLink.
pub fn interval_examples(docs: &[Document]) -> Vec<IntervalExample> {
    docs.iter()
        .flat_map(|d| {
            d.tlinks.iter().map(move |l| IntervalExample {
                doc_id: d.id.clone(),
                source: l.source.clone(),
                target: l.target.clone(),
                relation: l.relation,
                provenance: Provenance::Annotated,
            })
        })
        .collect()
}
