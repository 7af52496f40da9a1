use std::collections::HashMap;
use std::hash::Hasher;
use std::path::Path;

use fnv::FnvHasher;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{PointDistribution, Predictor, PredictorError, RelationSet};
use crate::algebra::{AllenRelation, EndpointPairKey, EntityId, PointEndpoint, PointRelation};
use crate::corpus::Document;
use crate::dataset::{read_jsonl, write_jsonl, DatasetError, PointExample};
use crate::encoding::{QuerySubject, TaggedQuery};

/// Stable per-key seed mixed with a user seed.
pub fn fnv_seed(key: &str, seed: u64) -> u64 {
    let mut h = FnvHasher::default();
    h.write(key.as_bytes());
    h.finish() ^ seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn points_of(query: &TaggedQuery) -> Result<(&PointEndpoint, &PointEndpoint), PredictorError> {
    match &query.subject {
        QuerySubject::Points { x, y } => Ok((x, y)),
        QuerySubject::Entities { .. } => Err(PredictorError::Unsupported(query.id.clone())),
    }
}

/// Answers from gold annotations, optionally flipping each answer to one of
/// the two other labels with probability `noise`.
#[derive(Debug, Clone)]
pub struct GoldOracle {
    gold: HashMap<(String, PointEndpoint, PointEndpoint), PointRelation>,
    noise: f64,
    seed: u64,
}

impl GoldOracle {
    pub fn new(docs: &[Document], noise: f64, seed: u64) -> Self {
        let mut gold = HashMap::new();
        for doc in docs {
            for link in &doc.tlinks {
                for s in link.interval().point_statements() {
                    let inv = s.inverse();
                    gold.insert((doc.id.clone(), s.source, s.target), s.relation);
                    gold.insert((doc.id.clone(), inv.source, inv.target), inv.relation);
                }
            }
        }
        GoldOracle { gold, noise: noise.clamp(0.0, 1.0), seed }
    }
}

impl Predictor for GoldOracle {
    fn name(&self) -> String {
        format!("oracle:noise={}", self.noise)
    }

    fn predict(&self, query: &TaggedQuery) -> Result<PointDistribution, PredictorError> {
        let (x, y) = points_of(query)?;
        let rel = *self
            .gold
            .get(&(query.doc_id.clone(), x.clone(), y.clone()))
            .ok_or_else(|| PredictorError::Unsupported(query.id.clone()))?;
        let mut rng = ChaCha8Rng::seed_from_u64(fnv_seed(&query.id, self.seed));
        let rel = if rng.gen_bool(self.noise) {
            let others: Vec<PointRelation> = PointRelation::ALL.into_iter().filter(|&r| r != rel).collect();
            others[rng.gen_range(0..2)]
        } else {
            rel
        };
        Ok(PointDistribution::one_hot(rel))
    }
}

/// Uniformly random distributions (a flat Dirichlet draw per query).
#[derive(Debug, Clone)]
pub struct RandomPredictor {
    pub seed: u64,
}

impl Predictor for RandomPredictor {
    fn name(&self) -> String {
        format!("random:seed={}", self.seed)
    }

    fn predict(&self, query: &TaggedQuery) -> Result<PointDistribution, PredictorError> {
        let mut rng = ChaCha8Rng::seed_from_u64(fnv_seed(&query.id, self.seed));
        let draw = [(); 3].map(|_| -(1.0 - rng.gen::<f64>()).ln());
        let total: f64 = draw.iter().sum();
        Ok(PointDistribution::from_array(draw.map(|g| g / total)))
    }
}

/// Always certain of one point relation.
#[derive(Debug, Clone)]
pub struct MajorityPredictor {
    pub relation: PointRelation,
}

impl MajorityPredictor {
    /// Most frequent relation in `examples`, ties going to `<`.
    pub fn from_examples(examples: &[PointExample]) -> Self {
        let mut counts = [0usize; 3];
        for e in examples {
            counts[e.relation.index()] += 1;
        }
        let best = (0..3).fold(0, |b, i| if counts[i] > counts[b] { i } else { b });
        MajorityPredictor { relation: PointRelation::ALL[best] }
    }
}

impl Predictor for MajorityPredictor {
    fn name(&self) -> String {
        format!("majority:{}", self.relation)
    }

    fn predict(&self, _query: &TaggedQuery) -> Result<PointDistribution, PredictorError> {
        Ok(PointDistribution::one_hot(self.relation))
    }
}

/// Label frequencies of a training set, per endpoint pair.
#[derive(Debug, Clone)]
pub struct PriorPredictor {
    pub priors: [PointDistribution; 4],
}

impl PriorPredictor {
    pub fn from_examples(examples: &[PointExample]) -> Self {
        let mut counts = [[0.0f64; 3]; 4];
        for e in examples {
            counts[e.pair_key.index()][e.relation.index()] += 1.0;
        }
        PriorPredictor {
            priors: counts.map(|c| {
                PointDistribution::from_array(c).normalized().unwrap_or_else(PointDistribution::uniform)
            }),
        }
    }
}

impl Predictor for PriorPredictor {
    fn name(&self) -> String {
        "prior".to_string()
    }

    fn predict(&self, query: &TaggedQuery) -> Result<PointDistribution, PredictorError> {
        let (x, y) = points_of(query)?;
        Ok(self.priors[EndpointPairKey::new(x.side, y.side).index()])
    }
}

/// One line of a probability file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityRecord {
    pub query_id: String,
    pub p_before: f64,
    pub p_equal: f64,
    pub p_after: f64,
}

impl ProbabilityRecord {
    pub fn distribution(&self) -> PointDistribution {
        PointDistribution::new(self.p_before, self.p_equal, self.p_after)
    }
}

pub fn read_probability_file(path: &Path) -> Result<Vec<ProbabilityRecord>, DatasetError> {
    read_jsonl(path)
}

pub fn write_probability_file(path: &Path, records: &[ProbabilityRecord]) -> Result<(), DatasetError> {
    write_jsonl(path, records)
}

/// Distributions loaded from a probability file, joined on query id.
#[derive(Debug, Clone, Default)]
pub struct FilePredictor {
    table: HashMap<String, PointDistribution>,
}

impl FilePredictor {
    pub const SUM_TOLERANCE: f64 = 1e-6;

    pub fn from_records(records: impl IntoIterator<Item = ProbabilityRecord>) -> Result<Self, PredictorError> {
        let mut table = HashMap::new();
        for r in records {
            let d = r.distribution();
            if !d.is_valid() || (d.sum() - 1.0).abs() > Self::SUM_TOLERANCE {
                return Err(PredictorError::Invalid {
                    query_id: r.query_id,
                    message: format!("not a probability distribution: {:?}", d.to_array()),
                });
            }
            table.entry(r.query_id).or_insert(d);
        }
        Ok(FilePredictor { table })
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

impl Predictor for FilePredictor {
    fn name(&self) -> String {
        "file".to_string()
    }

    fn predict(&self, query: &TaggedQuery) -> Result<PointDistribution, PredictorError> {
        self.table.get(&query.id).copied().ok_or_else(|| PredictorError::MissingPrediction(query.id.clone()))
    }
}

/// Interval-level baselines that bypass the point decoder.
#[derive(Debug, Clone, PartialEq)]
pub enum IntervalBaseline {
    Majority(AllenRelation),
    Random { seed: u64, relations: RelationSet },
}

impl IntervalBaseline {
    /// Most frequent label among the annotated links of `docs`, ties going to
    /// the earlier relation in canonical order.
    pub fn majority_of(docs: &[Document]) -> Self {
        let mut counts = [0usize; 13];
        for l in docs.iter().flat_map(|d| &d.tlinks) {
            counts[l.relation as usize] += 1;
        }
        let best = (0..13).fold(0, |b, i| if counts[i] > counts[b] { i } else { b });
        IntervalBaseline::Majority(AllenRelation::ALL[best])
    }

    pub fn relations(&self) -> &'static [AllenRelation] {
        match self {
            IntervalBaseline::Majority(_) => RelationSet::Full.relations(),
            IntervalBaseline::Random { relations, .. } => relations.relations(),
        }
    }

    pub fn predict(&self, doc_id: &str, x: &EntityId, y: &EntityId) -> AllenRelation {
        match self {
            IntervalBaseline::Majority(r) => *r,
            IntervalBaseline::Random { seed, relations } => {
                let labels = relations.relations();
                let mut rng = ChaCha8Rng::seed_from_u64(fnv_seed(&format!("{doc_id}::{x}::{y}"), *seed));
                labels[rng.gen_range(0..labels.len())]
            }
        }
    }
}
