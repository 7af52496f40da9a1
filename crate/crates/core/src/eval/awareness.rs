use std::collections::{BTreeMap, BTreeSet};

use log::warn;
use serde::{Deserialize, Serialize};

use crate::algebra::{interval_closure, transitive_reduction, IntervalLink};
use crate::par;

/// Closure-aware precision, recall and their harmonic mean.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TemporalAwareness {
    pub precision: f64,
    pub recall: f64,
    pub f_a: f64,
    pub precision_hits: usize,
    pub precision_total: usize,
    pub recall_hits: usize,
    pub recall_total: usize,
    /// Documents whose links could not be closed on at least one side.
    pub inconsistent_documents: usize,
}

struct Side {
    closure: BTreeSet<IntervalLink>,
    reduction: Vec<IntervalLink>,
    consistent: bool,
}

fn prepare(doc_id: &str, role: &str, links: &[IntervalLink]) -> Side {
    match (interval_closure(links), transitive_reduction(links)) {
        (Ok(closure), Ok(reduction)) => Side { closure, reduction, consistent: true },
        (Err(err), _) | (_, Err(err)) => {
            warn!("{doc_id}: {role} links are inconsistent ({err}); scoring them unclosed");
            let canonical: BTreeSet<IntervalLink> = links.iter().map(IntervalLink::canonical).collect();
            Side { reduction: canonical.iter().cloned().collect(), closure: canonical, consistent: false }
        }
    }
}

fn entailed(reduction: &[IntervalLink], closure: &BTreeSet<IntervalLink>) -> usize {
    reduction.iter().filter(|l| closure.contains(&l.canonical())).count()
}

/// Micro-averaged temporal awareness over documents. Documents missing from
/// one side count as having no links there.
pub fn temporal_awareness(
    gold: &BTreeMap<String, Vec<IntervalLink>>,
    pred: &BTreeMap<String, Vec<IntervalLink>>,
) -> TemporalAwareness {
    let ids: Vec<&String> = gold.keys().chain(pred.keys()).collect::<BTreeSet<_>>().into_iter().collect();
    let empty = Vec::new();
    let terms = par::map(&ids, |id| {
        let g = prepare(id, "gold", gold.get(*id).unwrap_or(&empty));
        let p = prepare(id, "predicted", pred.get(*id).unwrap_or(&empty));
        (
            entailed(&p.reduction, &g.closure),
            p.reduction.len(),
            entailed(&g.reduction, &p.closure),
            g.reduction.len(),
            !(g.consistent && p.consistent),
        )
    });
    let mut ta = TemporalAwareness::default();
    for (ph, pt, rh, rt, bad) in terms {
        ta.precision_hits += ph;
        ta.precision_total += pt;
        ta.recall_hits += rh;
        ta.recall_total += rt;
        ta.inconsistent_documents += bad as usize;
    }
    let frac = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    ta.precision = frac(ta.precision_hits, ta.precision_total);
    ta.recall = frac(ta.recall_hits, ta.recall_total);
    ta.f_a = if ta.precision + ta.recall > 0.0 {
        2.0 * ta.precision * ta.recall / (ta.precision + ta.recall)
    } else {
        0.0
    };
    ta
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::AllenRelation::*;

    fn one(links: Vec<IntervalLink>) -> BTreeMap<String, Vec<IntervalLink>> {
        BTreeMap::from([("d".to_string(), links)])
    }

    #[test]
    fn hand_case() {
        let gold = one(vec![IntervalLink::new("A", Before, "B"), IntervalLink::new("B", Before, "C")]);
        let pred = one(vec![IntervalLink::new("A", Before, "B"), IntervalLink::new("A", Before, "C")]);
        let ta = temporal_awareness(&gold, &pred);
        assert_eq!(ta.precision, 1.0);
        assert_eq!(ta.recall, 0.5);
        assert_eq!(ta.f_a, 2.0 / 3.0);
        let back = temporal_awareness(&pred, &gold);
        assert_eq!(back.precision, ta.recall);
        assert_eq!(back.recall, ta.precision);
    }

    #[test]
    fn identical_and_redundant() {
        let gold = one(vec![IntervalLink::new("A", Before, "B"), IntervalLink::new("B", Meets, "C")]);
        assert_eq!(temporal_awareness(&gold, &gold).f_a, 1.0);
        let mut redundant = gold.clone();
        redundant.get_mut("d").unwrap().push(IntervalLink::new("C", After, "A"));
        assert_eq!(temporal_awareness(&gold, &redundant).f_a, 1.0);
    }

    #[test]
    fn inconsistent_predictions_do_not_abort() {
        let gold = one(vec![IntervalLink::new("A", Before, "B"), IntervalLink::new("B", Before, "C")]);
        let pred = one(vec![
            IntervalLink::new("A", Before, "B"),
            IntervalLink::new("B", Before, "C"),
            IntervalLink::new("C", Before, "A"),
        ]);
        let ta = temporal_awareness(&gold, &pred);
        assert_eq!(ta.inconsistent_documents, 1);
        assert_eq!(ta.precision_total, 3);
        assert_eq!(ta.precision_hits, 2);
        assert_eq!(ta.recall, 1.0);
        assert_eq!(temporal_awareness(&BTreeMap::new(), &BTreeMap::new()).f_a, 0.0);
    }
}
