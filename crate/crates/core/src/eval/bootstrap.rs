use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::par;

pub const DEFAULT_RESAMPLES: usize = 1000;
pub const DEFAULT_LEVEL: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceInterval {
    pub low: f64,
    pub high: f64,
    pub level: f64,
    pub resamples: usize,
    pub seed: u64,
}

/// Linear-interpolated quantile of sorted values.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Percentile bootstrap interval of `metric` over resamples (with replacement)
/// of the paired examples. Each resample draws from its own stream of one
/// seeded generator, so the result does not depend on thread count.
pub fn bootstrap_ci<L, F>(
    metric: F,
    pred: &[L],
    gold: &[L],
    resamples: usize,
    level: f64,
    seed: u64,
) -> Result<ConfidenceInterval, EvalError>
where
    L: Clone + Send + Sync,
    F: Fn(&[L], &[L]) -> f64 + Sync + Send,
{
    if pred.len() != gold.len() {
        return Err(EvalError::LengthMismatch { pred: pred.len(), gold: gold.len() });
    }
    if gold.is_empty() || resamples == 0 {
        return Err(EvalError::Empty);
    }
    let n = gold.len();
    let mut values = par::map_range(resamples, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let idx: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
        let p: Vec<L> = idx.iter().map(|&j| pred[j].clone()).collect();
        let g: Vec<L> = idx.iter().map(|&j| gold[j].clone()).collect();
        metric(&p, &g)
    });
    values.sort_by(f64::total_cmp);
    let alpha = (1.0 - level) / 2.0;
    Ok(ConfidenceInterval {
        low: quantile(&values, alpha),
        high: quantile(&values, 1.0 - alpha),
        level,
        resamples,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::accuracy;

    fn acc(p: &[bool], g: &[bool]) -> f64 {
        accuracy(p, g).unwrap()
    }

    #[test]
    fn constant_metric() {
        let v = vec![true; 50];
        let ci = bootstrap_ci(acc, &v, &v, 200, 0.95, 1).unwrap();
        assert_eq!((ci.low, ci.high), (1.0, 1.0));
    }

    #[test]
    fn seeded() {
        let g: Vec<bool> = (0..100).map(|i| i % 3 == 0).collect();
        let p: Vec<bool> = (0..100).map(|i| i % 2 == 0).collect();
        let a = bootstrap_ci(acc, &p, &g, 300, 0.9, 5).unwrap();
        assert_eq!(a, bootstrap_ci(acc, &p, &g, 300, 0.9, 5).unwrap());
        assert!(a.low < a.high);
    }

    #[test]
    fn quantile_interpolates() {
        assert_eq!(quantile(&[0.0, 1.0, 2.0, 3.0], 0.5), 1.5);
        assert_eq!(quantile(&[4.0], 0.025), 4.0);
    }
}
