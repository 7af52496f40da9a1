use std::collections::{BTreeMap, BTreeSet, HashSet};

use log::warn;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::examples::{interval_examples, IntervalExample, PointExample, Provenance};
use crate::algebra::{
    interval_closure, EntityId, IntervalBounds, IntervalLink, PointEndpoint, PointGraph, PointRelation,
};
use crate::corpus::Document;
use crate::par;

/// Examples that can be inverted and deduplicated as directed facts.
pub trait Augmentable: Clone + Send + Sync {
    type Key: Eq + std::hash::Hash;

    fn doc_id(&self) -> &str;
    /// Identity of the directed fact: document, source, target, relation.
    fn fact_key(&self) -> Self::Key;
    fn inverse(&self) -> Self;
}

impl Augmentable for PointExample {
    type Key = (String, PointEndpoint, PointEndpoint, PointRelation);

    fn doc_id(&self) -> &str {
        &self.doc_id
    }

    fn fact_key(&self) -> Self::Key {
        (self.doc_id.clone(), self.source.clone(), self.target.clone(), self.relation)
    }

    fn inverse(&self) -> Self {
        PointExample { provenance: Provenance::Inverse, ..self.flipped() }
    }
}

impl Augmentable for IntervalExample {
    type Key = (String, EntityId, EntityId, crate::algebra::AllenRelation);

    fn doc_id(&self) -> &str {
        &self.doc_id
    }

    fn fact_key(&self) -> Self::Key {
        (self.doc_id.clone(), self.source.clone(), self.target.clone(), self.relation)
    }

    fn inverse(&self) -> Self {
        IntervalExample { provenance: Provenance::Inverse, ..self.flipped() }
    }
}

/// Input plus the inverse of every example, deduplicated on directed facts.
pub fn augment_inverse<E: Augmentable>(examples: &[E]) -> Vec<E> {
    let mut seen = HashSet::with_capacity(examples.len() * 2);
    let mut out = Vec::with_capacity(examples.len() * 2);
    for e in examples {
        if seen.insert(e.fact_key()) {
            out.push(e.clone());
        }
    }
    for e in examples {
        let inv = e.inverse();
        if seen.insert(inv.fact_key()) {
            out.push(inv);
        }
    }
    out
}

fn unordered(a: &PointEndpoint, b: &PointEndpoint) -> (PointEndpoint, PointEndpoint) {
    if a <= b {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    }
}

fn document_points(doc: &Document) -> Vec<PointExample> {
    let mut examples = Vec::with_capacity(doc.tlinks.len() * 4);
    let mut seen = HashSet::new();
    for link in &doc.tlinks {
        for s in link.interval().point_statements() {
            let e = PointExample::new(doc.id.clone(), s.source, s.relation, s.target, Provenance::Annotated);
            if seen.insert(e.fact_key()) {
                examples.push(e);
            }
        }
    }
    // Endpoint pairs annotated with two different facts are dropped entirely.
    let mut facts: BTreeMap<(PointEndpoint, PointEndpoint), PointRelation> = BTreeMap::new();
    let mut contradictory = BTreeSet::new();
    for e in &examples {
        let c = e.statement().canonical();
        let key = (c.source, c.target);
        match facts.get(&key) {
            Some(&r) if r != c.relation => {
                contradictory.insert(key);
            }
            Some(_) => {}
            None => {
                facts.insert(key, c.relation);
            }
        }
    }
    if !contradictory.is_empty() {
        for (a, b) in &contradictory {
            warn!("{}: contradictory annotations for ({a}, {b}); dropping them", doc.id);
        }
        examples.retain(|e| !contradictory.contains(&unordered(&e.source, &e.target)));
    }
    examples
}

/// Four endpoint examples per TLink, in document and link order.
pub fn intervals_to_points(docs: &[Document]) -> Vec<PointExample> {
    par::map(docs, document_points).into_iter().flatten().collect()
}

fn group_by_doc<E: Augmentable>(examples: &[E]) -> Vec<Vec<E>> {
    let mut groups: BTreeMap<&str, Vec<E>> = BTreeMap::new();
    for e in examples {
        groups.entry(e.doc_id()).or_default().push(e.clone());
    }
    groups.into_values().collect()
}

fn closure_for_document(examples: &[PointExample], bounds: IntervalBounds) -> Vec<PointExample> {
    let Some(first) = examples.first() else { return Vec::new() };
    let doc_id = first.doc_id.as_str();
    let mut graph = PointGraph::new();
    let mut entities = BTreeSet::new();
    let mut covered = HashSet::new();
    for e in examples {
        if let Err(err) = graph.insert(e.statement()) {
            warn!("{doc_id}: skipping closure, {err}");
            return Vec::new();
        }
        entities.insert(e.source.entity.clone());
        entities.insert(e.target.entity.clone());
        covered.insert(unordered(&e.source, &e.target));
    }
    for entity in &entities {
        graph.add_point(entity.start());
        graph.add_point(entity.end());
        if bounds == IntervalBounds::Strict {
            if let Err(err) = graph.add_interval_bounds(entity) {
                warn!("{doc_id}: skipping closure, {err}");
                return Vec::new();
            }
        }
    }
    let closed = match graph.closure() {
        Ok(c) => c,
        Err(err) => {
            warn!("{doc_id}: skipping closure, {err}");
            return Vec::new();
        }
    };
    closed
        .statements()
        .filter(|s| s.source.entity != s.target.entity)
        .filter(|s| !covered.contains(&(s.source.clone(), s.target.clone())))
        .map(|s| {
            // Canonical output uses only `<` and `=`.
            let s = if s.relation == PointRelation::After { s.inverse() } else { s };
            PointExample::new(doc_id, s.source, s.relation, s.target, Provenance::Closure)
        })
        .collect()
}

/// Input plus every point relation entailed within each document that is not
/// already present in either direction.
pub fn augment_closure(examples: &[PointExample]) -> Vec<PointExample> {
    augment_closure_with(examples, IntervalBounds::Strict)
}

pub fn augment_closure_with(examples: &[PointExample], bounds: IntervalBounds) -> Vec<PointExample> {
    let groups = group_by_doc(examples);
    let derived = par::map(&groups, |g| closure_for_document(g, bounds));
    let mut out = examples.to_vec();
    out.extend(derived.into_iter().flatten());
    out
}

/// Flips a seeded half (rounded down) of the closure-derived `<` examples into `>`.
pub fn rebalance_lt_gt(examples: &[PointExample], seed: u64) -> Vec<PointExample> {
    let mut candidates: Vec<usize> = examples
        .iter()
        .enumerate()
        .filter(|(_, e)| e.provenance == Provenance::Closure && e.relation == PointRelation::Before)
        .map(|(i, _)| i)
        .collect();
    let half = candidates.len() / 2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    candidates.shuffle(&mut rng);
    let mut out = examples.to_vec();
    for &i in &candidates[..half] {
        out[i] = out[i].flipped();
    }
    out
}

fn interval_closure_for_document(examples: &[IntervalExample]) -> Vec<IntervalExample> {
    let Some(first) = examples.first() else { return Vec::new() };
    let doc_id = first.doc_id.as_str();
    let links: Vec<IntervalLink> = examples
        .iter()
        .map(|e| IntervalLink { source: e.source.clone(), target: e.target.clone(), relation: e.relation })
        .collect();
    let covered: HashSet<(EntityId, EntityId)> = links
        .iter()
        .map(|l| {
            let c = l.canonical();
            (c.source, c.target)
        })
        .collect();
    match interval_closure(&links) {
        Ok(closed) => closed
            .into_iter()
            .filter(|l| !covered.contains(&(l.source.clone(), l.target.clone())))
            .map(|l| IntervalExample {
                doc_id: doc_id.to_string(),
                source: l.source,
                target: l.target,
                relation: l.relation,
                provenance: Provenance::Closure,
            })
            .collect(),
        Err(err) => {
            warn!("{doc_id}: skipping interval closure, {err}");
            Vec::new()
        }
    }
}

/// Interval-level counterpart of [`augment_closure`].
pub fn augment_interval_closure(examples: &[IntervalExample]) -> Vec<IntervalExample> {
    let groups = group_by_doc(examples);
    let derived = par::map(&groups, |g| interval_closure_for_document(g));
    let mut out = examples.to_vec();
    out.extend(derived.into_iter().flatten());
    out
}

/// The four training sets of one granularity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetFamily<E> {
    pub raw: Vec<E>,
    pub inverse: Vec<E>,
    pub closure: Vec<E>,
    pub inverse_closure: Vec<E>,
}

impl<E> DatasetFamily<E> {
    pub const NAMES: [&'static str; 4] = ["raw", "inverse", "closure", "inverse_closure"];

    pub fn iter(&self) -> impl Iterator<Item = (&'static str, &Vec<E>)> {
        Self::NAMES
            .into_iter()
            .zip([&self.raw, &self.inverse, &self.closure, &self.inverse_closure])
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainingSets {
    pub points: DatasetFamily<PointExample>,
    pub intervals: DatasetFamily<IntervalExample>,
}

/// Raw, Inverse, Closure and Inverse & Closure sets at point and interval level.
pub fn build_training_sets(docs: &[Document], rebalance_seed: u64) -> TrainingSets {
    let raw = intervals_to_points(docs);
    let inverse = augment_inverse(&raw);
    let closure = rebalance_lt_gt(&augment_closure(&raw), rebalance_seed);
    let inverse_closure = augment_inverse(&closure);

    let raw_i = interval_examples(docs);
    let inverse_i = augment_inverse(&raw_i);
    let closure_i = augment_interval_closure(&raw_i);
    let inverse_closure_i = augment_inverse(&closure_i);

    TrainingSets {
        points: DatasetFamily { raw, inverse, closure, inverse_closure },
        intervals: DatasetFamily {
            raw: raw_i,
            inverse: inverse_i,
            closure: closure_i,
            inverse_closure: inverse_closure_i,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{AllenRelation, Side};
    use crate::corpus::{EntityKind, TLink, TemporalEntity, TimeMLRelation};

    fn doc(id: &str, links: &[(&str, TimeMLRelation, &str)]) -> Document {
        let dct = TemporalEntity { id: "t0".into(), kind: EntityKind::DocumentCreationTime, span: None, surface: None };
        Document {
            id: id.into(),
            text: String::new(),
            dct: dct.clone(),
            entities: vec![dct],
            tlinks: links.iter().map(|(a, r, b)| TLink::new(*a, *r, *b)).collect(),
        }
    }

    fn p(e: &str, side: Side) -> PointEndpoint {
        PointEndpoint::new(e, side)
    }

    #[test]
    fn starts_becomes_four_examples() {
        let ex = intervals_to_points(&[doc("d", &[("A", TimeMLRelation::Begins, "B")])]);
        let got: Vec<_> = ex.iter().map(|e| (e.source.clone(), e.relation, e.target.clone())).collect();
        use PointRelation::*;
        assert_eq!(
            got,
            vec![
                (p("A", Side::Start), Equal, p("B", Side::Start)),
                (p("A", Side::Start), Before, p("B", Side::End)),
                (p("A", Side::End), After, p("B", Side::Start)),
                (p("A", Side::End), Before, p("B", Side::End)),
            ]
        );
        assert!(intervals_to_points(&[]).is_empty());
    }

    #[test]
    fn contradictory_pairs_are_dropped() {
        let ex = intervals_to_points(&[doc(
            "d",
            &[("A", TimeMLRelation::Before, "B"), ("B", TimeMLRelation::Before, "A")],
        )]);
        assert!(ex.is_empty(), "{ex:?}");
        // Same fact stated in both directions is not a contradiction.
        let ex = intervals_to_points(&[doc(
            "d",
            &[("A", TimeMLRelation::Before, "B"), ("B", TimeMLRelation::After, "A")],
        )]);
        assert_eq!(ex.len(), 8);
    }

    #[test]
    fn inverse_adds_swapped_examples() {
        let raw = vec![PointExample::new("d", p("x", Side::Start), PointRelation::Before, p("y", Side::Start), Provenance::Annotated)];
        let inv = augment_inverse(&raw);
        assert_eq!(inv.len(), 2);
        assert_eq!(inv[1].source, p("y", Side::Start));
        assert_eq!(inv[1].relation, PointRelation::After);
        assert_eq!(inv[1].provenance, Provenance::Inverse);
        assert_eq!(augment_inverse(&inv), inv);
    }

    #[test]
    fn closure_adds_point_facts_for_shared_start() {
        let raw = intervals_to_points(&[doc(
            "d",
            &[("x", TimeMLRelation::Begins, "y"), ("x", TimeMLRelation::Begins, "z")],
        )]);
        let closed = augment_closure(&raw);
        let derived: BTreeSet<_> = closed
            .iter()
            .filter(|e| e.provenance == Provenance::Closure)
            .map(|e| e.statement())
            .collect();
        use PointRelation::*;
        let expected: BTreeSet<_> = [
            (p("y", Side::Start), Equal, p("z", Side::Start)),
            (p("y", Side::Start), Before, p("z", Side::End)),
            (p("z", Side::Start), Before, p("y", Side::End)),
        ]
        .into_iter()
        .map(|(a, r, b)| crate::algebra::PointStatement::new(a, r, b))
        .collect();
        assert_eq!(derived, expected);
        assert_eq!(augment_closure(&closed), closed);
    }

    #[test]
    fn inconsistent_documents_keep_only_annotations() {
        let raw = intervals_to_points(&[doc(
            "d",
            &[
                ("A", TimeMLRelation::Before, "B"),
                ("B", TimeMLRelation::Before, "C"),
                ("C", TimeMLRelation::Before, "A"),
            ],
        )]);
        assert_eq!(augment_closure(&raw), raw);
    }

    #[test]
    fn rebalance_flips_half() {
        let ex: Vec<_> = (0..10)
            .map(|i| PointExample::new("d", p(&format!("a{i}"), Side::Start), PointRelation::Before, p(&format!("b{i}"), Side::End), Provenance::Closure))
            .collect();
        for seed in [0, 1, 99] {
            let out = rebalance_lt_gt(&ex, seed);
            assert_eq!(out.iter().filter(|e| e.relation == PointRelation::After).count(), 5);
            for (a, b) in ex.iter().zip(&out) {
                assert!(a == b || a.flipped() == *b);
                assert_eq!(a.statement().canonical(), b.statement().canonical());
            }
            assert_eq!(rebalance_lt_gt(&ex, seed), out);
        }
        assert_eq!(rebalance_lt_gt(&[], 3), vec![]);
    }

    #[test]
    fn training_sets_nest() {
        let docs = crate::synth::generate_documents(&crate::synth::SynthConfig::default());
        let sets = build_training_sets(&docs, 0);
        let p = &sets.points;
        assert_eq!(p.raw.len(), docs.iter().map(|d| d.tlinks.len() * 4).sum::<usize>());
        assert_eq!(p.inverse.len(), 2 * p.raw.len());
        assert_eq!(p.inverse_closure.len(), 2 * p.closure.len());
        assert_eq!(sets.intervals.inverse.len(), 2 * sets.intervals.raw.len());
        assert!(sets.intervals.closure.len() >= sets.intervals.raw.len());
        assert!(sets
            .intervals
            .closure
            .iter()
            .all(|e| e.relation != AllenRelation::Overlaps || e.provenance == Provenance::Closure));
    }
}
