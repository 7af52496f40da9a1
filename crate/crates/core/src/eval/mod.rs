//! Accuracy, macro-F1, temporal awareness, bootstrap intervals and calibration.

mod awareness;
mod bootstrap;
mod calibration;
mod metrics;
mod report;

use std::collections::{BTreeMap, HashMap};

use log::warn;
use serde::{Deserialize, Serialize};

use crate::algebra::{AllenRelation, EntityId, IntervalLink, PointEndpoint, PointRelation};
use crate::corpus::Document;
use crate::dataset::PointExample;
use crate::decoder::{PointPredictionRecord, PredictionRecord, RelationSet};

pub use awareness::{temporal_awareness, TemporalAwareness};
pub use bootstrap::{bootstrap_ci, ConfidenceInterval, DEFAULT_LEVEL, DEFAULT_RESAMPLES};
pub use calibration::{calibration, CalibrationBin, CalibrationReport, LabelCalibration, DEFAULT_BINS};
pub use metrics::{accuracy, macro_f1, per_label_scores, LabelScore};
pub use report::{render_svg, write_calibration_csv};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("{pred} predictions for {gold} gold labels")]
    LengthMismatch { pred: usize, gold: usize },
    #[error("nothing to evaluate")]
    Empty,
    #[error("{examples} examples cannot fill {bins} bins")]
    InsufficientData { examples: usize, bins: usize },
    #[error("{missing} of {total} gold pairs have no prediction (first: {first})")]
    Coverage { missing: usize, total: usize, first: String },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalOptions {
    pub relations: RelationSet,
    pub resamples: usize,
    pub level: f64,
    pub seed: u64,
    pub bins: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            relations: RelationSet::Full,
            resamples: DEFAULT_RESAMPLES,
            level: DEFAULT_LEVEL,
            seed: 0,
            bins: DEFAULT_BINS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport<L> {
    /// Echo of the configuration that produced the report.
    pub config: serde_json::Value,
    pub examples: usize,
    pub accuracy: f64,
    pub macro_f1: f64,
    pub per_label: Vec<LabelScore<L>>,
    pub temporal_awareness: Option<TemporalAwareness>,
    pub bootstrap: BTreeMap<String, ConfidenceInterval>,
    pub calibration: Option<CalibrationReport<L>>,
}

fn label_metrics<L>(
    pred: &[L],
    gold: &[L],
    labels: &[L],
    options: &EvalOptions,
    config: serde_json::Value,
) -> Result<EvalReport<L>, EvalError>
where
    L: PartialEq + Clone + Send + Sync,
{
    let mut bootstrap = BTreeMap::new();
    // Zero resamples switches the intervals off.
    if options.resamples > 0 {
        bootstrap.insert(
            "accuracy".to_string(),
            bootstrap_ci(|p, g| accuracy(p, g).unwrap_or(0.0), pred, gold, options.resamples, options.level, options.seed)?,
        );
        bootstrap.insert(
            "macro_f1".to_string(),
            bootstrap_ci(
                |p, g| macro_f1(p, g, labels).unwrap_or(0.0),
                pred,
                gold,
                options.resamples,
                options.level,
                options.seed,
            )?,
        );
    }
    Ok(EvalReport {
        config,
        examples: gold.len(),
        accuracy: accuracy(pred, gold)?,
        macro_f1: macro_f1(pred, gold, labels)?,
        per_label: per_label_scores(pred, gold, labels)?,
        temporal_awareness: None,
        bootstrap,
        calibration: None,
    })
}

/// Scores interval predictions against every annotated pair of `gold`.
///
/// A prediction for the reversed pair counts, inverted. Each gold pair must be
/// covered.
pub fn evaluate_intervals(
    gold: &[Document],
    predictions: &[PredictionRecord],
    options: &EvalOptions,
    config: serde_json::Value,
) -> Result<EvalReport<AllenRelation>, EvalError> {
    let mut index: HashMap<(&str, &EntityId, &EntityId), &PredictionRecord> = HashMap::new();
    for p in predictions {
        index.entry((p.doc_id.as_str(), &p.source, &p.target)).or_insert(p);
    }
    let labels = options.relations.relations();

    let mut pred_labels = Vec::new();
    let mut gold_labels = Vec::new();
    let mut probs = Vec::new();
    let mut calibratable = true;
    let mut missing = Vec::new();
    let mut gold_links: BTreeMap<String, Vec<IntervalLink>> = BTreeMap::new();
    let mut pred_links: BTreeMap<String, Vec<IntervalLink>> = BTreeMap::new();
    let mut total = 0;
    for doc in gold {
        for l in &doc.tlinks {
            total += 1;
            let (relation, scores): (AllenRelation, Vec<f64>) =
                if let Some(p) = index.get(&(doc.id.as_str(), &l.source, &l.target)) {
                    (p.predicted_relation, labels.iter().map(|r| p.score_per_relation.get(r).copied().unwrap_or(f64::NAN)).collect())
                } else if let Some(p) = index.get(&(doc.id.as_str(), &l.target, &l.source)) {
                    (
                        p.predicted_relation.invert(),
                        labels
                            .iter()
                            .map(|r| p.score_per_relation.get(&r.invert()).copied().unwrap_or(f64::NAN))
                            .collect(),
                    )
                } else {
                    missing.push(format!("{}::{}::{}", doc.id, l.source, l.target));
                    continue;
                };
            let sum: f64 = scores.iter().sum();
            if calibratable && (sum.is_finite() && sum > 0.0) {
                probs.push(scores.iter().map(|s| s / sum).collect::<Vec<f64>>());
            } else {
                calibratable = false;
            }
            pred_labels.push(relation);
            gold_labels.push(l.relation);
            gold_links.entry(doc.id.clone()).or_default().push(l.interval());
            pred_links.entry(doc.id.clone()).or_default().push(IntervalLink {
                source: l.source.clone(),
                target: l.target.clone(),
                relation,
            });
        }
    }
    if !missing.is_empty() {
        return Err(EvalError::Coverage { missing: missing.len(), total, first: missing.swap_remove(0) });
    }
    let mut report = label_metrics(&pred_labels, &gold_labels, labels, options, config)?;
    report.temporal_awareness = Some(temporal_awareness(&gold_links, &pred_links));
    if calibratable {
        report.calibration = Some(calibration(&probs, &gold_labels, labels, options.bins)?);
    } else {
        warn!("predictions lack usable scores for every label; skipping calibration");
    }
    Ok(report)
}

/// Scores point predictions against the directed gold examples.
pub fn evaluate_points(
    gold: &[PointExample],
    predictions: &[PointPredictionRecord],
    options: &EvalOptions,
    config: serde_json::Value,
) -> Result<EvalReport<PointRelation>, EvalError> {
    let mut index: HashMap<(&str, PointEndpoint, PointEndpoint), &PointPredictionRecord> = HashMap::new();
    for p in predictions {
        let s = PointEndpoint::new(p.source_entity.clone(), p.source_side);
        let t = PointEndpoint::new(p.target_entity.clone(), p.target_side);
        index.entry((p.doc_id.as_str(), s, t)).or_insert(p);
    }
    let mut pred_labels = Vec::with_capacity(gold.len());
    let mut probs = Vec::with_capacity(gold.len());
    let mut missing = Vec::new();
    for e in gold {
        let key = (e.doc_id.as_str(), e.source.clone(), e.target.clone());
        let rev = (e.doc_id.as_str(), e.target.clone(), e.source.clone());
        let d = if let Some(p) = index.get(&key) {
            pred_labels.push(p.predicted_relation);
            p.distribution()
        } else if let Some(p) = index.get(&rev) {
            pred_labels.push(p.predicted_relation.invert());
            p.distribution().reversed()
        } else {
            missing.push(format!("{}::{}::{}", e.doc_id, e.source, e.target));
            continue;
        };
        probs.push(d.normalized().map(|d| d.to_array().to_vec()));
    }
    if !missing.is_empty() {
        return Err(EvalError::Coverage { missing: missing.len(), total: gold.len(), first: missing.swap_remove(0) });
    }
    let gold_labels: Vec<PointRelation> = gold.iter().map(|e| e.relation).collect();
    let labels = PointRelation::ALL;
    let mut report = label_metrics(&pred_labels, &gold_labels, &labels, options, config)?;
    if let Some(probs) = probs.into_iter().collect::<Option<Vec<_>>>() {
        report.calibration = Some(calibration(&probs, &gold_labels, &labels, options.bins)?);
    } else {
        warn!("some point predictions carry no probability mass; skipping calibration");
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decoder::{baseline_predictions, classify_documents, GoldOracle, IntervalBaseline};
    use crate::synth::{generate_documents, SynthConfig};

    fn quick() -> EvalOptions {
        EvalOptions { resamples: 50, ..EvalOptions::default() }
    }

    #[test]
    fn oracle_scores_perfectly() {
        let docs = generate_documents(&SynthConfig::default());
        let preds = classify_documents(&docs, &GoldOracle::new(&docs, 0.0, 0), RelationSet::Full).unwrap();
        let r = evaluate_intervals(&docs, &preds, &quick(), serde_json::Value::Null).unwrap();
        assert_eq!(r.accuracy, 1.0);
        assert_eq!(r.temporal_awareness.unwrap().f_a, 1.0);
        assert_eq!(r.per_label.iter().map(|s| s.support).sum::<usize>(), r.examples);
        assert!(r.calibration.is_some());
    }

    #[test]
    fn reversed_predictions_are_inverted() {
        let docs = generate_documents(&SynthConfig::default());
        let mut preds = classify_documents(&docs, &GoldOracle::new(&docs, 0.0, 0), RelationSet::Full).unwrap();
        for p in preds.iter_mut() {
            std::mem::swap(&mut p.source, &mut p.target);
            p.predicted_relation = p.predicted_relation.invert();
            p.score_per_relation = p.score_per_relation.iter().map(|(r, s)| (r.invert(), *s)).collect();
        }
        let r = evaluate_intervals(&docs, &preds, &quick(), serde_json::Value::Null).unwrap();
        assert_eq!(r.accuracy, 1.0);
    }

    #[test]
    fn missing_pairs_are_reported() {
        let docs = generate_documents(&SynthConfig::default());
        let mut preds = baseline_predictions(&docs, &IntervalBaseline::Majority(AllenRelation::Before));
        preds.pop();
        assert!(matches!(
            evaluate_intervals(&docs, &preds, &quick(), serde_json::Value::Null),
            Err(EvalError::Coverage { missing: 1, .. })
        ));
    }
}
