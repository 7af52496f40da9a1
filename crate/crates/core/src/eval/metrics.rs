use serde::{Deserialize, Serialize};

use super::EvalError;

fn check<L>(pred: &[L], gold: &[L]) -> Result<(), EvalError> {
    if pred.len() != gold.len() {
        return Err(EvalError::LengthMismatch { pred: pred.len(), gold: gold.len() });
    }
    if gold.is_empty() {
        return Err(EvalError::Empty);
    }
    Ok(())
}

pub fn accuracy<L: PartialEq>(pred: &[L], gold: &[L]) -> Result<f64, EvalError> {
    check(pred, gold)?;
    let hits = pred.iter().zip(gold).filter(|(p, g)| p == g).count();
    Ok(hits as f64 / gold.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelScore<L> {
    pub label: L,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Gold occurrences.
    pub support: usize,
    pub predicted: usize,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn per_label_scores<L: PartialEq + Clone>(
    pred: &[L],
    gold: &[L],
    labels: &[L],
) -> Result<Vec<LabelScore<L>>, EvalError> {
    check(pred, gold)?;
    Ok(labels
        .iter()
        .map(|label| {
            let tp = pred.iter().zip(gold).filter(|(p, g)| *p == label && *g == label).count();
            let predicted = pred.iter().filter(|p| *p == label).count();
            let support = gold.iter().filter(|g| *g == label).count();
            let precision = ratio(tp, predicted);
            let recall = ratio(tp, support);
            let f1 = if precision + recall > 0.0 { 2.0 * precision * recall / (precision + recall) } else { 0.0 };
            LabelScore { label: label.clone(), precision, recall, f1, support, predicted }
        })
        .collect())
}

/// Unweighted mean of per-label F1 over `labels`; a label that never occurs
/// still counts, with F1 zero.
pub fn macro_f1<L: PartialEq + Clone>(pred: &[L], gold: &[L], labels: &[L]) -> Result<f64, EvalError> {
    let scores = per_label_scores(pred, gold, labels)?;
    if scores.is_empty() {
        return Err(EvalError::Empty);
    }
    Ok(scores.iter().map(|s| s.f1).sum::<f64>() / scores.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn accuracy_cases() {
        assert_eq!(accuracy(&[1, 2, 3], &[1, 2, 3]).unwrap(), 1.0);
        assert_eq!(accuracy(&[1, 0, 0, 0], &[1, 2, 3, 4]).unwrap(), 0.25);
        assert!(matches!(accuracy(&[1], &[1, 2]), Err(EvalError::LengthMismatch { .. })));
        assert!(matches!(accuracy::<u8>(&[], &[]), Err(EvalError::Empty)));
    }

    #[test]
    fn macro_f1_hand_computed() {
        let gold = ['a', 'a', 'a', 'b', 'b', 'c'];
        let pred = ['a', 'a', 'b', 'b', 'c', 'c'];
        // a: p 1, r 2/3 -> 0.8; b: p 1/2, r 1/2 -> 0.5; c: p 1/2, r 1 -> 2/3; d absent -> 0
        let labels = ['a', 'b', 'c', 'd'];
        let scores = per_label_scores(&pred, &gold, &labels).unwrap();
        let f1: Vec<f64> = scores.iter().map(|s| s.f1).collect();
        assert_relative_eq!(f1[0], 0.8, epsilon = 1e-12);
        assert_relative_eq!(f1[1], 0.5, epsilon = 1e-12);
        assert_relative_eq!(f1[2], 2.0 / 3.0, epsilon = 1e-12);
        assert_eq!(f1[3], 0.0);
        assert_eq!(scores.iter().map(|s| s.support).sum::<usize>(), gold.len());
        assert_relative_eq!(
            macro_f1(&pred, &gold, &labels).unwrap(),
            (0.8 + 0.5 + 2.0 / 3.0) / 4.0,
            epsilon = 1e-12
        );
        assert_eq!(macro_f1(&gold, &gold, &['a', 'b', 'c']).unwrap(), 1.0);
    }
}
