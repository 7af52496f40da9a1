use log::warn;
use serde::{Deserialize, Serialize};

use super::EvalError;

pub const DEFAULT_BINS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationBin {
    pub bin: usize,
    pub mean_confidence: f64,
    pub positive_fraction: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelCalibration<L> {
    pub label: L,
    pub support: usize,
    pub ece: f64,
    pub curve: Vec<CalibrationBin>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport<L> {
    pub bins: usize,
    pub examples: usize,
    pub labels: Vec<LabelCalibration<L>>,
    /// Per-label ECE averaged with gold support as weights.
    pub ece: f64,
}

/// Splits examples, ordered by `conf`, into `bins` groups of equal size
/// (sizes differ by at most one). Also returns the expected calibration error.
fn quantile_bins(conf: &[f64], hit: &[bool], bins: usize) -> (Vec<CalibrationBin>, f64) {
    let n = conf.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| conf[a].total_cmp(&conf[b]).then(a.cmp(&b)));
    let mut gap = 0.0;
    let curve = (0..bins)
        .map(|b| {
            let members = &order[b * n / bins..(b + 1) * n / bins];
            let count = members.len();
            let confidence: f64 = members.iter().map(|&i| conf[i]).sum();
            let hits = members.iter().filter(|&&i| hit[i]).count();
            // count * |positive fraction - mean confidence|
            gap += (hits as f64 - confidence).abs();
            CalibrationBin {
                bin: b,
                mean_confidence: confidence / count as f64,
                positive_fraction: hits as f64 / count as f64,
                count,
            }
        })
        .collect();
    (curve, gap / n as f64)
}

/// One-vs-rest calibration curves and expected calibration error.
///
/// `probs[i][k]` is the predicted probability that example `i` has label
/// `labels[k]`. With fewer examples than `bins`, the bin count drops to the
/// number of examples.
pub fn calibration<L: PartialEq + Clone>(
    probs: &[Vec<f64>],
    gold: &[L],
    labels: &[L],
    bins: usize,
) -> Result<CalibrationReport<L>, EvalError> {
    if probs.len() != gold.len() {
        return Err(EvalError::LengthMismatch { pred: probs.len(), gold: gold.len() });
    }
    if let Some(row) = probs.iter().find(|r| r.len() != labels.len()) {
        return Err(EvalError::LengthMismatch { pred: row.len(), gold: labels.len() });
    }
    let n = gold.len();
    if n == 0 || bins == 0 {
        return Err(EvalError::InsufficientData { examples: n, bins });
    }
    let bins = if n < bins {
        warn!("only {n} examples for {bins} calibration bins; using {n} bins");
        n
    } else {
        bins
    };

    let mut weighted = 0.0;
    let per_label: Vec<LabelCalibration<L>> = labels
        .iter()
        .enumerate()
        .map(|(k, label)| {
            let conf: Vec<f64> = probs.iter().map(|r| r[k]).collect();
            let hit: Vec<bool> = gold.iter().map(|g| g == label).collect();
            let (curve, ece) = quantile_bins(&conf, &hit, bins);
            let support = hit.iter().filter(|&&h| h).count();
            weighted += support as f64 * ece;
            LabelCalibration { label: label.clone(), support, ece, curve }
        })
        .collect();
    let total: usize = per_label.iter().map(|l| l.support).sum();
    Ok(CalibrationReport {
        bins,
        examples: n,
        ece: if total == 0 { 0.0 } else { weighted / total as f64 },
        labels: per_label,
    })
}
