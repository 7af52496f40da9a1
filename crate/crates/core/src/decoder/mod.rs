//! Interval relations from point-relation probabilities.
//!
//! Each endpoint pair is queried twice, once per tag direction. The two
//! distributions are combined elementwise after reversing the swapped one,
//! every Allen relation is scored by the product of its four endpoint
//! probabilities, and the best-scoring relation wins, ties going to the
//! earlier relation in canonical order.

mod predictors;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{AllenRelation, EntityId, PointRelation, Quad, Side};
use crate::corpus::Document;
use crate::dataset::PointExample;
use crate::encoding::{pair_queries, tag_point_pair, Direction, EncodingError, TaggedQuery};
use crate::par;

pub use predictors::{
    fnv_seed, read_probability_file, write_probability_file, FilePredictor, GoldOracle, IntervalBaseline,
    MajorityPredictor, PriorPredictor, ProbabilityRecord, RandomPredictor,
};

/// Floor applied to combined probabilities before multiplying.
pub const PROBABILITY_FLOOR: f64 = 1e-9;

/// Probabilities of `<`, `=` and `>` for one endpoint pair.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PointDistribution {
    pub p_before: f64,
    pub p_equal: f64,
    pub p_after: f64,
}

impl PointDistribution {
    pub fn new(p_before: f64, p_equal: f64, p_after: f64) -> Self {
        PointDistribution { p_before, p_equal, p_after }
    }

    pub fn uniform() -> Self {
        Self::new(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0)
    }

    pub fn one_hot(rel: PointRelation) -> Self {
        let mut a = [0.0; 3];
        a[rel.index()] = 1.0;
        Self::from_array(a)
    }

    pub fn from_array([b, e, a]: [f64; 3]) -> Self {
        Self::new(b, e, a)
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.p_before, self.p_equal, self.p_after]
    }

    pub fn get(&self, rel: PointRelation) -> f64 {
        self.to_array()[rel.index()]
    }

    /// `(p<, p=, p>)` to `(p>, p=, p<)`.
    pub fn reversed(self) -> Self {
        Self::new(self.p_after, self.p_equal, self.p_before)
    }

    pub fn sum(&self) -> f64 {
        self.p_before + self.p_equal + self.p_after
    }

    pub fn scaled(self, k: f64) -> Self {
        Self::from_array(self.to_array().map(|p| p * k))
    }

    pub fn floored(self, floor: f64) -> Self {
        Self::from_array(self.to_array().map(|p| if p.is_nan() { p } else { p.max(floor) }))
    }

    /// Rescaled to sum to one; `None` when the mass is zero or not finite.
    pub fn normalized(self) -> Option<Self> {
        let s = self.sum();
        (s > 0.0 && s.is_finite()).then(|| self.scaled(1.0 / s))
    }

    /// Most probable relation, ties going to the earlier of `<`, `=`, `>`.
    pub fn argmax(&self) -> PointRelation {
        let a = self.to_array();
        let mut best = 0;
        for i in 1..3 {
            if a[i] > a[best] {
                best = i;
            }
        }
        PointRelation::ALL[best]
    }

    pub fn is_valid(&self) -> bool {
        self.to_array().iter().all(|p| p.is_finite() && *p >= 0.0)
    }
}

pub type QuadDistribution = Quad<PointDistribution>;

/// Forward distribution times the reversed swapped distribution, unnormalized.
pub fn combine_symmetric(forward: PointDistribution, swapped: PointDistribution) -> PointDistribution {
    let r = swapped.reversed();
    PointDistribution::new(forward.p_before * r.p_before, forward.p_equal * r.p_equal, forward.p_after * r.p_after)
}

/// Candidate labels for decoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RelationSet {
    /// All thirteen relations.
    #[default]
    Full,
    /// The eleven relations that occur in TempEval-3 (no overlaps/overlapped-by).
    Observed,
}

impl RelationSet {
    pub fn relations(self) -> &'static [AllenRelation] {
        match self {
            RelationSet::Full => &AllenRelation::ALL,
            RelationSet::Observed => &AllenRelation::OBSERVED,
        }
    }
}

impl fmt::Display for RelationSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RelationSet::Full => "full",
            RelationSet::Observed => "observed",
        })
    }
}

impl std::str::FromStr for RelationSet {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "full" | "full-13" | "13" => Ok(RelationSet::Full),
            "observed" | "observed-11" | "11" => Ok(RelationSet::Observed),
            _ => Err(format!("unknown relation set {s:?} (expected full or observed)")),
        }
    }
}

/// Product of the four endpoint probabilities of each relation.
pub fn score_intervals(q: &QuadDistribution, relations: RelationSet) -> BTreeMap<AllenRelation, f64> {
    relations
        .relations()
        .iter()
        .map(|&r| {
            let points = r.to_points();
            let score = q.iter().map(|(key, d)| d.get(points[key])).product();
            (r, score)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodedPrediction {
    pub relation: AllenRelation,
    pub scores: BTreeMap<AllenRelation, f64>,
    pub quad: QuadDistribution,
}

#[derive(Debug, thiserror::Error)]
pub enum DecodeError {
    #[error("no relation has a positive finite score")]
    DegenerateScores,
    #[error("document {0} is not loaded")]
    UnknownDocument(String),
    #[error(transparent)]
    Encoding(#[from] EncodingError),
    #[error(transparent)]
    Predictor(#[from] PredictorError),
}

/// Floors `q`, scores every candidate relation and takes the argmax.
pub fn decode(q: &QuadDistribution, relations: RelationSet) -> Result<DecodedPrediction, DecodeError> {
    let floored = q.map(|d| d.floored(PROBABILITY_FLOOR));
    let scores = score_intervals(&floored, relations);
    if scores.values().any(|s| !s.is_finite()) {
        return Err(DecodeError::DegenerateScores);
    }
    let mut best: Option<(AllenRelation, f64)> = None;
    for &r in relations.relations() {
        let s = scores[&r];
        if best.is_none_or(|(_, b)| s > b) {
            best = Some((r, s));
        }
    }
    match best {
        Some((relation, s)) if s > 0.0 => Ok(DecodedPrediction { relation, scores, quad: *q }),
        _ => Err(DecodeError::DegenerateScores),
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PredictorError {
    #[error("no prediction for query {0}")]
    MissingPrediction(String),
    #[error("query {query_id}: {message}")]
    Invalid { query_id: String, message: String },
    #[error("query {0} is not a point query this predictor can answer")]
    Unsupported(String),
}

/// Source of point-relation distributions for tagged queries.
///
/// The distribution is read as `x REL y` for the endpoints carrying the x and
/// y tags.
pub trait Predictor: Send + Sync {
    fn name(&self) -> String;

    fn predict(&self, query: &TaggedQuery) -> Result<PointDistribution, PredictorError>;

    fn predict_batch(&self, queries: &[TaggedQuery]) -> Result<Vec<PointDistribution>, PredictorError> {
        queries.iter().map(|q| self.predict(q)).collect()
    }

    /// Whether distinct pairs may be classified concurrently.
    fn is_concurrent(&self) -> bool {
        true
    }
}

/// Decodes the relation between `x` and `y` from eight predictor queries.
pub fn classify_pair(
    doc: &Document,
    x: &EntityId,
    y: &EntityId,
    predictor: &dyn Predictor,
    relations: RelationSet,
) -> Result<DecodedPrediction, DecodeError> {
    let pairs = pair_queries(doc, x, y)?;
    let queries: Vec<TaggedQuery> =
        pairs.iter().flat_map(|(_, f, s)| [f.clone(), s.clone()]).collect();
    let dists = predictor.predict_batch(&queries)?;
    let quad = QuadDistribution::from_fn(|key| {
        let i = key.index() * 2;
        combine_symmetric(dists[i], dists[i + 1])
    });
    decode(&quad, relations)
}

/// A decoded relation for one annotated pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub doc_id: String,
    pub source: EntityId,
    pub target: EntityId,
    pub predicted_relation: AllenRelation,
    pub score_per_relation: BTreeMap<AllenRelation, f64>,
}

/// Classifies every annotated pair of `docs`, in document and link order.
pub fn classify_documents(
    docs: &[Document],
    predictor: &dyn Predictor,
    relations: RelationSet,
) -> Result<Vec<PredictionRecord>, DecodeError> {
    let jobs: Vec<(&Document, &EntityId, &EntityId)> = docs
        .iter()
        .flat_map(|d| d.tlinks.iter().map(move |l| (d, &l.source, &l.target)))
        .collect();
    let run = |&(doc, x, y): &(&Document, &EntityId, &EntityId)| {
        classify_pair(doc, x, y, predictor, relations).map(|p| PredictionRecord {
            doc_id: doc.id.clone(),
            source: x.clone(),
            target: y.clone(),
            predicted_relation: p.relation,
            score_per_relation: p.scores,
        })
    };
    let results = if predictor.is_concurrent() { par::map(&jobs, run) } else { jobs.iter().map(run).collect() };
    results.into_iter().collect()
}

/// A point-relation prediction for one directed endpoint pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointPredictionRecord {
    pub doc_id: String,
    pub source_entity: EntityId,
    pub source_side: Side,
    pub target_entity: EntityId,
    pub target_side: Side,
    pub predicted_relation: PointRelation,
    pub p_before: f64,
    pub p_equal: f64,
    pub p_after: f64,
}

impl PointPredictionRecord {
    pub fn distribution(&self) -> PointDistribution {
        PointDistribution::new(self.p_before, self.p_equal, self.p_after)
    }
}

/// Answers the forward query of every example directly, without decoding.
pub fn predict_points(
    docs: &[Document],
    examples: &[PointExample],
    predictor: &dyn Predictor,
) -> Result<Vec<PointPredictionRecord>, DecodeError> {
    let by_id: HashMap<&str, &Document> = docs.iter().map(|d| (d.id.as_str(), d)).collect();
    let run = |e: &PointExample| -> Result<PointPredictionRecord, DecodeError> {
        let doc = by_id.get(e.doc_id.as_str()).ok_or_else(|| DecodeError::UnknownDocument(e.doc_id.clone()))?;
        let q = tag_point_pair(doc, &e.source, &e.target, Direction::Forward)?;
        let d = predictor.predict(&q)?;
        Ok(PointPredictionRecord {
            doc_id: e.doc_id.clone(),
            source_entity: e.source.entity.clone(),
            source_side: e.source.side,
            target_entity: e.target.entity.clone(),
            target_side: e.target.side,
            predicted_relation: d.argmax(),
            p_before: d.p_before,
            p_equal: d.p_equal,
            p_after: d.p_after,
        })
    };
    let results = if predictor.is_concurrent() { par::map(examples, run) } else { examples.iter().map(run).collect() };
    results.into_iter().collect()
}

/// Predictions of an interval baseline for every annotated pair of `docs`.
pub fn baseline_predictions(docs: &[Document], baseline: &IntervalBaseline) -> Vec<PredictionRecord> {
    docs.iter()
        .flat_map(|d| {
            d.tlinks.iter().map(move |l| {
                let r = baseline.predict(&d.id, &l.source, &l.target);
                PredictionRecord {
                    doc_id: d.id.clone(),
                    source: l.source.clone(),
                    target: l.target.clone(),
                    predicted_relation: r,
                    score_per_relation: baseline
                        .relations()
                        .iter()
                        .map(|&c| (c, if c == r { 1.0 } else { 0.0 }))
                        .collect(),
                }
            })
        })
        .collect()
}
