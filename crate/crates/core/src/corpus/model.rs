use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::algebra::{AllenRelation, EntityId, IntervalLink, UnknownLabel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntityKind {
    Event,
    Timex,
    DocumentCreationTime,
}

/// Byte range into [`Document::text`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start >= self.end
    }

    pub fn overlaps(&self, other: &Span) -> bool {
        self.start < other.end && other.start < self.end
    }

    pub fn contains(&self, other: &Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemporalEntity {
    pub id: EntityId,
    pub kind: EntityKind,
    /// Absent for the document creation time and for annotations outside the body text.
    pub span: Option<Span>,
    pub surface: Option<String>,
}

/// TimeML 1.2.1 TLINK relation types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TimeMLRelation {
    Before,
    After,
    Ibefore,
    Iafter,
    Begins,
    BegunBy,
    Ends,
    EndedBy,
    Includes,
    IsIncluded,
    During,
    DuringInv,
    Simultaneous,
    Identity,
}

impl TimeMLRelation {
    pub const ALL: [TimeMLRelation; 14] = [
        TimeMLRelation::Before,
        TimeMLRelation::After,
        TimeMLRelation::Ibefore,
        TimeMLRelation::Iafter,
        TimeMLRelation::Begins,
        TimeMLRelation::BegunBy,
        TimeMLRelation::Ends,
        TimeMLRelation::EndedBy,
        TimeMLRelation::Includes,
        TimeMLRelation::IsIncluded,
        TimeMLRelation::During,
        TimeMLRelation::DuringInv,
        TimeMLRelation::Simultaneous,
        TimeMLRelation::Identity,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TimeMLRelation::Before => "BEFORE",
            TimeMLRelation::After => "AFTER",
            TimeMLRelation::Ibefore => "IBEFORE",
            TimeMLRelation::Iafter => "IAFTER",
            TimeMLRelation::Begins => "BEGINS",
            TimeMLRelation::BegunBy => "BEGUN_BY",
            TimeMLRelation::Ends => "ENDS",
            TimeMLRelation::EndedBy => "ENDED_BY",
            TimeMLRelation::Includes => "INCLUDES",
            TimeMLRelation::IsIncluded => "IS_INCLUDED",
            TimeMLRelation::During => "DURING",
            TimeMLRelation::DuringInv => "DURING_INV",
            TimeMLRelation::Simultaneous => "SIMULTANEOUS",
            TimeMLRelation::Identity => "IDENTITY",
        }
    }

    /// TempEval-3 evaluation-script mapping onto Allen relations.
    pub fn to_allen(self) -> AllenRelation {
        match self {
            TimeMLRelation::Before => AllenRelation::Before,
            TimeMLRelation::After => AllenRelation::After,
            TimeMLRelation::Ibefore => AllenRelation::Meets,
            TimeMLRelation::Iafter => AllenRelation::MetBy,
            TimeMLRelation::Begins => AllenRelation::Starts,
            TimeMLRelation::BegunBy => AllenRelation::StartedBy,
            TimeMLRelation::Ends => AllenRelation::Finishes,
            TimeMLRelation::EndedBy => AllenRelation::FinishedBy,
            TimeMLRelation::Includes => AllenRelation::Contains,
            TimeMLRelation::IsIncluded => AllenRelation::During,
            TimeMLRelation::During
            | TimeMLRelation::DuringInv
            | TimeMLRelation::Simultaneous
            | TimeMLRelation::Identity => AllenRelation::Equals,
        }
    }
}

pub fn map_timeml_to_allen(label: TimeMLRelation) -> AllenRelation {
    label.to_allen()
}

impl fmt::Display for TimeMLRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TimeMLRelation {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_uppercase();
        Self::ALL
            .into_iter()
            .find(|r| r.as_str() == norm)
            .ok_or_else(|| UnknownLabel(s.to_string()))
    }
}

/// An annotated temporal link after label mapping.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TLink {
    pub source: EntityId,
    pub target: EntityId,
    pub relation: AllenRelation,
    pub original_label: TimeMLRelation,
}

impl TLink {
    pub fn new(source: impl Into<EntityId>, label: TimeMLRelation, target: impl Into<EntityId>) -> Self {
        TLink {
            source: source.into(),
            target: target.into(),
            relation: label.to_allen(),
            original_label: label,
        }
    }

    pub fn interval(&self) -> IntervalLink {
        IntervalLink {
            source: self.source.clone(),
            target: self.target.clone(),
            relation: self.relation,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub text: String,
    pub dct: TemporalEntity,
    /// All entities including the document creation time.
    pub entities: Vec<TemporalEntity>,
    pub tlinks: Vec<TLink>,
}

impl Document {
    pub fn entity(&self, id: &EntityId) -> Option<&TemporalEntity> {
        self.entities.iter().find(|e| &e.id == id)
    }

    pub fn interval_links(&self) -> Vec<IntervalLink> {
        self.tlinks.iter().map(TLink::interval).collect()
    }
}
