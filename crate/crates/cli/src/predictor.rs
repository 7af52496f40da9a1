use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use ifp_core::algebra::{AllenRelation, PointRelation};
use ifp_core::corpus::Document;
use ifp_core::dataset::{read_interval_dataset, read_point_dataset};
use ifp_core::decoder::{
    read_probability_file, FilePredictor, GoldOracle, IntervalBaseline, MajorityPredictor, Predictor,
    PriorPredictor, RandomPredictor, RelationSet,
};

use crate::UsageError;

/// Which predictor answers the queries.
///
/// `random`, `majority`, `prior`, `oracle` and `file` answer point queries;
/// the `interval-*` baselines label pairs directly and skip the decoder.
#[derive(Debug, Clone, PartialEq)]
pub enum PredictorSpec {
    Random,
    Majority(Option<PointRelation>),
    Prior,
    Oracle { noise: f64 },
    File(PathBuf),
    IntervalMajority(Option<AllenRelation>),
    IntervalRandom,
}

impl FromStr for PredictorSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let spec = match (head, arg) {
            ("random", None) => PredictorSpec::Random,
            ("prior", None) => PredictorSpec::Prior,
            ("majority", None) => PredictorSpec::Majority(None),
            ("majority", Some(l)) => PredictorSpec::Majority(Some(l.parse().map_err(|e| format!("{e}"))?)),
            ("oracle", None) => PredictorSpec::Oracle { noise: 0.0 },
            ("oracle", Some(a)) => {
                let v = a.strip_prefix("noise=").unwrap_or(a);
                let noise: f64 = v.parse().map_err(|_| format!("bad oracle noise `{v}`"))?;
                if !(0.0..=1.0).contains(&noise) {
                    return Err(format!("oracle noise {noise} outside [0, 1]"));
                }
                PredictorSpec::Oracle { noise }
            }
            ("file", Some(p)) if !p.is_empty() => PredictorSpec::File(PathBuf::from(p)),
            ("interval-random", None) => PredictorSpec::IntervalRandom,
            ("interval-majority", None) => PredictorSpec::IntervalMajority(None),
            ("interval-majority", Some(l)) => {
                PredictorSpec::IntervalMajority(Some(l.parse().map_err(|e| format!("{e}"))?))
            }
            _ => {
                return Err(format!(
                    "unknown predictor `{s}` (expected random, prior, majority[:<label>], oracle[:noise=f], \
                     file:<path>, interval-random, interval-majority[:<relation>])"
                ))
            }
        };
        Ok(spec)
    }
}

impl fmt::Display for PredictorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PredictorSpec::Random => f.write_str("random"),
            PredictorSpec::Majority(None) => f.write_str("majority"),
            PredictorSpec::Majority(Some(r)) => write!(f, "majority:{r}"),
            PredictorSpec::Prior => f.write_str("prior"),
            PredictorSpec::Oracle { noise } => write!(f, "oracle:noise={noise}"),
            PredictorSpec::File(p) => write!(f, "file:{}", p.display()),
            PredictorSpec::IntervalMajority(None) => f.write_str("interval-majority"),
            PredictorSpec::IntervalMajority(Some(r)) => write!(f, "interval-majority:{r}"),
            PredictorSpec::IntervalRandom => f.write_str("interval-random"),
        }
    }
}

impl serde::Serialize for PredictorSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl PredictorSpec {
    pub fn is_interval_baseline(&self) -> bool {
        matches!(self, PredictorSpec::IntervalMajority(_) | PredictorSpec::IntervalRandom)
    }

    fn train_file<'a>(&self, train: Option<&'a Path>) -> Result<&'a Path> {
        match train {
            Some(p) => Ok(p),
            None => bail!(UsageError(format!("predictor `{self}` needs --train <dataset>"))),
        }
    }

    pub fn point_predictor(&self, gold: &[Document], train: Option<&Path>, seed: u64) -> Result<Box<dyn Predictor>> {
        Ok(match self {
            PredictorSpec::Random => Box::new(RandomPredictor { seed }),
            PredictorSpec::Majority(Some(r)) => Box::new(MajorityPredictor { relation: *r }),
            PredictorSpec::Majority(None) => {
                let path = self.train_file(train)?;
                let examples = read_point_dataset(path)?;
                if examples.is_empty() {
                    bail!("{} holds no examples", path.display());
                }
                Box::new(MajorityPredictor::from_examples(&examples))
            }
            PredictorSpec::Prior => {
                let examples = read_point_dataset(self.train_file(train)?)?;
                Box::new(PriorPredictor::from_examples(&examples))
            }
            PredictorSpec::Oracle { noise } => Box::new(GoldOracle::new(gold, *noise, seed)),
            PredictorSpec::File(path) => {
                let records = read_probability_file(path)?;
                Box::new(
                    FilePredictor::from_records(records)
                        .with_context(|| format!("loading {}", path.display()))?,
                )
            }
            PredictorSpec::IntervalMajority(_) | PredictorSpec::IntervalRandom => {
                bail!(UsageError(format!("`{self}` labels interval pairs and has no point-level form")))
            }
        })
    }

    pub fn interval_baseline(&self, train: Option<&Path>, seed: u64, relations: RelationSet) -> Result<IntervalBaseline> {
        Ok(match self {
            PredictorSpec::IntervalRandom => IntervalBaseline::Random { seed, relations },
            PredictorSpec::IntervalMajority(Some(r)) => IntervalBaseline::Majority(*r),
            PredictorSpec::IntervalMajority(None) => {
                let examples = read_interval_dataset(self.train_file(train)?)?;
                let mut counts = [0usize; 13];
                for e in &examples {
                    counts[e.relation as usize] += 1;
                }
                if examples.is_empty() {
                    bail!("interval training set is empty");
                }
                let best = (0..13).fold(0, |b, i| if counts[i] > counts[b] { i } else { b });
                IntervalBaseline::Majority(AllenRelation::ALL[best])
            }
            _ => unreachable!("caller checks is_interval_baseline"),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_prints() {
        for s in [
            "random",
            "majority",
            "majority:<",
            "prior",
            "oracle:noise=0.1",
            "file:probs.jsonl",
            "interval-random",
            "interval-majority:before",
        ] {
            let spec: PredictorSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        assert_eq!("oracle".parse::<PredictorSpec>().unwrap(), PredictorSpec::Oracle { noise: 0.0 });
        assert!("oracle:noise=2".parse::<PredictorSpec>().is_err());
        assert!("file:".parse::<PredictorSpec>().is_err());
        assert!("gpt".parse::<PredictorSpec>().is_err());
    }
}
