//! Independent reference implementations for tests: exhaustive timestamp
//! enumeration, Allen relations read off concrete witness intervals, a
//! direction-symmetric random predictor and a perfectly calibrated generator.
//!
//! Nothing here shares code with the reasoning it checks.

use std::collections::{BTreeMap, BTreeSet};
use std::hash::Hasher;

use fnv::FnvHasher;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{AllenRelation, EntityId, IntervalLink, PointEndpoint, PointRelation, PointStatement, Side};
use crate::decoder::{PointDistribution, Predictor, PredictorError, QuadDistribution};
use crate::encoding::{QuerySubject, TaggedQuery};

fn rel(a: u32, b: u32) -> PointRelation {
    match a.cmp(&b) {
        std::cmp::Ordering::Less => PointRelation::Before,
        std::cmp::Ordering::Equal => PointRelation::Equal,
        std::cmp::Ordering::Greater => PointRelation::After,
    }
}

/// Every definite relation that holds in all integer assignments (values
/// `0..points.len()`, which realise every weak order) satisfying
/// `statements`, as canonical statements over distinct points. `None` when no
/// assignment exists.
pub fn assignment_oracle(points: &[PointEndpoint], statements: &[PointStatement]) -> Option<BTreeSet<PointStatement>> {
    let mut pts: Vec<PointEndpoint> = points.to_vec();
    for s in statements {
        pts.push(s.source.clone());
        pts.push(s.target.clone());
    }
    pts.sort();
    pts.dedup();
    let n = pts.len();
    let idx = |p: &PointEndpoint| pts.binary_search(p).expect("collected above");
    // Constraints checked once their later point is assigned.
    let mut checks: Vec<Vec<(usize, PointRelation, usize)>> = vec![Vec::new(); n];
    for s in statements {
        let (a, b) = (idx(&s.source), idx(&s.target));
        checks[a.max(b)].push((a, s.relation, b));
    }

    let mut seen = vec![0u8; n * n];
    let mut any = false;
    let mut values = vec![0u32; n];
    fn search(
        k: usize,
        n: usize,
        values: &mut Vec<u32>,
        checks: &[Vec<(usize, PointRelation, usize)>],
        seen: &mut [u8],
        any: &mut bool,
    ) {
        if k == n {
            *any = true;
            for i in 0..n {
                for j in i + 1..n {
                    seen[i * n + j] |= 1 << rel(values[i], values[j]).index();
                }
            }
            return;
        }
        for v in 0..n as u32 {
            values[k] = v;
            if checks[k].iter().all(|&(a, r, b)| rel(values[a], values[b]) == r) {
                search(k + 1, n, values, checks, seen, any);
            }
        }
    }
    search(0, n, &mut values, &checks, &mut seen, &mut any);
    if !any {
        return None;
    }
    let mut out = BTreeSet::new();
    for i in 0..n {
        for j in i + 1..n {
            let mask = seen[i * n + j];
            if mask.count_ones() == 1 {
                let r = PointRelation::ALL[mask.trailing_zeros() as usize];
                out.insert(PointStatement::new(pts[i].clone(), r, pts[j].clone()));
            }
        }
    }
    Some(out)
}

/// Witness intervals `(x, y)` for each relation, straight from its definition.
pub fn witness(r: AllenRelation) -> ((u32, u32), (u32, u32)) {
    use AllenRelation::*;
    match r {
        Before => ((0, 1), (2, 3)),
        After => ((2, 3), (0, 1)),
        Meets => ((0, 1), (1, 2)),
        MetBy => ((1, 2), (0, 1)),
        Overlaps => ((0, 2), (1, 3)),
        OverlappedBy => ((1, 3), (0, 2)),
        Starts => ((0, 1), (0, 2)),
        StartedBy => ((0, 2), (0, 1)),
        Finishes => ((1, 2), (0, 2)),
        FinishedBy => ((0, 2), (1, 2)),
        Contains => ((0, 3), (1, 2)),
        During => ((1, 2), (0, 3)),
        Equals => ((0, 1), (0, 1)),
    }
}

/// Endpoint relations `[SS, SE, ES, EE]` of the witness pair.
pub fn witness_points(r: AllenRelation) -> [PointRelation; 4] {
    let ((xs, xe), (ys, ye)) = witness(r);
    [rel(xs, ys), rel(xs, ye), rel(xe, ys), rel(xe, ye)]
}

/// Allen relation of two concrete intervals, by case analysis on endpoints.
pub fn classify_intervals((xs, xe): (u32, u32), (ys, ye): (u32, u32)) -> AllenRelation {
    use AllenRelation::*;
    assert!(xs < xe && ys < ye);
    if xe < ys {
        Before
    } else if ye < xs {
        After
    } else if xe == ys {
        Meets
    } else if ye == xs {
        MetBy
    } else if xs == ys && xe == ye {
        Equals
    } else if xs == ys {
        if xe < ye { Starts } else { StartedBy }
    } else if xe == ye {
        if xs > ys { Finishes } else { FinishedBy }
    } else if xs < ys && ye < xe {
        Contains
    } else if ys < xs && xe < ye {
        During
    } else if xs < ys {
        Overlaps
    } else {
        OverlappedBy
    }
}

/// Interval relations entailed by `links` according to [`assignment_oracle`]
/// with strict entity bounds, keyed by canonical (sorted) entity pair.
pub fn interval_oracle(links: &[IntervalLink]) -> Option<BTreeMap<(EntityId, EntityId), AllenRelation>> {
    let mut entities: BTreeSet<EntityId> = BTreeSet::new();
    let mut statements = Vec::new();
    for l in links {
        entities.insert(l.source.clone());
        entities.insert(l.target.clone());
        let ((xs, xe), (ys, ye)) = witness(l.relation);
        let pairs = [
            (Side::Start, Side::Start, rel(xs, ys)),
            (Side::Start, Side::End, rel(xs, ye)),
            (Side::End, Side::Start, rel(xe, ys)),
            (Side::End, Side::End, rel(xe, ye)),
        ];
        for (a, b, r) in pairs {
            statements.push(PointStatement::new(
                PointEndpoint::new(l.source.clone(), a),
                r,
                PointEndpoint::new(l.target.clone(), b),
            ));
        }
    }
    for e in &entities {
        statements.push(PointStatement::new(e.start(), PointRelation::Before, e.end()));
    }
    let points: Vec<PointEndpoint> = entities.iter().flat_map(|e| [e.start(), e.end()]).collect();
    let entailed = assignment_oracle(&points, &statements)?;
    let lookup = |a: &PointEndpoint, b: &PointEndpoint| -> Option<PointRelation> {
        if a < b {
            entailed.iter().find(|s| &s.source == a && &s.target == b).map(|s| s.relation)
        } else {
            entailed.iter().find(|s| &s.source == b && &s.target == a).map(|s| s.relation.invert())
        }
    };
    let mut out = BTreeMap::new();
    let ents: Vec<&EntityId> = entities.iter().collect();
    for (i, x) in ents.iter().enumerate() {
        for y in &ents[i + 1..] {
            let quad = [
                lookup(&x.start(), &y.start()),
                lookup(&x.start(), &y.end()),
                lookup(&x.end(), &y.start()),
                lookup(&x.end(), &y.end()),
            ];
            if let [Some(a), Some(b), Some(c), Some(d)] = quad {
                if let Some(r) = AllenRelation::ALL.into_iter().find(|&r| witness_points(r) == [a, b, c, d]) {
                    out.insert(((*x).clone(), (*y).clone()), r);
                }
            }
        }
    }
    Some(out)
}

/// Product scores computed from witness intervals, independent of the
/// decoder's decomposition table.
pub fn brute_force_scores(q: &QuadDistribution) -> BTreeMap<AllenRelation, f64> {
    AllenRelation::ALL
        .into_iter()
        .map(|r| {
            let points = witness_points(r);
            let score = (0..4).map(|k| q.0[k].get(points[k])).product();
            (r, score)
        })
        .collect()
}

fn hash_seed(key: &str, seed: u64) -> u64 {
    let mut h = FnvHasher::default();
    h.write(key.as_bytes());
    h.write_u64(seed);
    h.finish()
}

/// Random distributions that respect direction: the query `(b, a)` receives
/// the reverse of the distribution for `(a, b)`.
#[derive(Debug, Clone)]
pub struct SymmetricRandom {
    pub seed: u64,
}

impl Predictor for SymmetricRandom {
    fn name(&self) -> String {
        "symmetric-random".into()
    }

    fn predict(&self, query: &TaggedQuery) -> Result<PointDistribution, PredictorError> {
        let QuerySubject::Points { x, y } = &query.subject else {
            return Err(PredictorError::Unsupported(query.id.clone()));
        };
        let (a, b, flip) = if x <= y { (x, y, false) } else { (y, x, true) };
        let mut rng = ChaCha8Rng::seed_from_u64(hash_seed(&format!("{}|{a}|{b}", query.doc_id), self.seed));
        let raw = [(); 3].map(|_| rng.gen::<f64>() + 0.01);
        let total: f64 = raw.iter().sum();
        let d = PointDistribution::from_array(raw.map(|v| v / total));
        Ok(if flip { d.reversed() } else { d })
    }
}

/// `n` three-way probability vectors with labels drawn from those very
/// probabilities.
pub fn calibrated_sample(n: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut probs = Vec::with_capacity(n);
    let mut gold = Vec::with_capacity(n);
    for _ in 0..n {
        let g = [(); 3].map(|_| -(1.0 - rng.gen::<f64>()).ln());
        let total: f64 = g.iter().sum();
        let p = g.map(|v| v / total);
        let u: f64 = rng.gen();
        let label = if u < p[0] {
            0
        } else if u < p[0] + p[1] {
            1
        } else {
            2
        };
        probs.push(p.to_vec());
        gold.push(label);
    }
    (probs, gold)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn witnesses_classify_to_themselves() {
        for r in AllenRelation::ALL {
            let (x, y) = witness(r);
            assert_eq!(classify_intervals(x, y), r);
        }
    }

    #[test]
    fn oracle_basic() {
        let p = |e: &str| PointEndpoint::new(e, Side::Start);
        let s = vec![
            PointStatement::new(p("a"), PointRelation::Before, p("b")),
            PointStatement::new(p("b"), PointRelation::Before, p("c")),
        ];
        let got = assignment_oracle(&[], &s).unwrap();
        assert!(got.contains(&PointStatement::new(p("a"), PointRelation::Before, p("c"))));
        let bad = vec![s[0].clone(), PointStatement::new(p("b"), PointRelation::Before, p("a"))];
        assert!(assignment_oracle(&[], &bad).is_none());
    }
}
