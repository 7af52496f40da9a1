use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::graph::{ClosedGraph, EntityId, InconsistencyError, PointEndpoint, PointGraph, PointStatement};
use super::relation::{AllenRelation, EndpointPairKey, PointQuad, Quad};

/// An interval relation between two entities of one document.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct IntervalLink {
    pub source: EntityId,
    pub target: EntityId,
    pub relation: AllenRelation,
}

impl IntervalLink {
    pub fn new(source: impl Into<EntityId>, relation: AllenRelation, target: impl Into<EntityId>) -> Self {
        IntervalLink { source: source.into(), target: target.into(), relation }
    }

    pub fn inverse(&self) -> Self {
        IntervalLink {
            source: self.target.clone(),
            target: self.source.clone(),
            relation: self.relation.invert(),
        }
    }

    /// Same fact oriented with `source <= target`.
    pub fn canonical(&self) -> Self {
        if self.source <= self.target {
            self.clone()
        } else {
            self.inverse()
        }
    }

    /// The four endpoint statements defining this link.
    pub fn point_statements(&self) -> impl Iterator<Item = PointStatement> + '_ {
        let quad = self.relation.to_points();
        EndpointPairKey::ALL.into_iter().map(move |key| {
            PointStatement::new(
                PointEndpoint::new(self.source.clone(), key.x_side()),
                quad[key],
                PointEndpoint::new(self.target.clone(), key.y_side()),
            )
        })
    }
}

impl fmt::Display for IntervalLink {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.source, self.relation, self.target)
    }
}

/// How entity endpoints are constrained before reasoning.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntervalBounds {
    /// `start < end` is asserted for every entity.
    #[default]
    Strict,
    /// Only `start <= end` is assumed, which adds no definite fact.
    NonStrict,
}

/// Point graph of `links` plus the entity bound constraints.
pub fn links_to_point_graph<'a, I>(links: I, bounds: IntervalBounds) -> Result<PointGraph, InconsistencyError>
where
    I: IntoIterator<Item = &'a IntervalLink>,
{
    let mut g = PointGraph::new();
    let mut entities = BTreeSet::new();
    for link in links {
        for s in link.point_statements() {
            g.insert(s)?;
        }
        entities.insert(link.source.clone());
        entities.insert(link.target.clone());
    }
    for e in &entities {
        g.add_point(e.start());
        g.add_point(e.end());
        if bounds == IntervalBounds::Strict {
            g.add_interval_bounds(e)?;
        }
    }
    Ok(g)
}

fn quad_between(closed: &ClosedGraph, x: &EntityId, y: &EntityId) -> Option<PointQuad> {
    let xs = closed.index_of(&x.start())?;
    let xe = closed.index_of(&x.end())?;
    let ys = closed.index_of(&y.start())?;
    let ye = closed.index_of(&y.end())?;
    Some(Quad([
        closed.get(xs, ys)?,
        closed.get(xs, ye)?,
        closed.get(xe, ys)?,
        closed.get(xe, ye)?,
    ]))
}

/// Every interval relation fully determined by `links`, in canonical orientation.
pub fn interval_closure(links: &[IntervalLink]) -> Result<BTreeSet<IntervalLink>, InconsistencyError> {
    interval_closure_with(links, IntervalBounds::Strict)
}

pub fn interval_closure_with(
    links: &[IntervalLink],
    bounds: IntervalBounds,
) -> Result<BTreeSet<IntervalLink>, InconsistencyError> {
    let g = links_to_point_graph(links, bounds)?;
    let closed = ClosedGraph::build(&g)?;
    let entities: BTreeSet<&EntityId> = links.iter().flat_map(|l| [&l.source, &l.target]).collect();
    let entities: Vec<&EntityId> = entities.into_iter().collect();
    let mut out = BTreeSet::new();
    for (i, x) in entities.iter().enumerate() {
        for y in &entities[i + 1..] {
            if let Some(r) = quad_between(&closed, x, y).and_then(|q| AllenRelation::from_points(&q)) {
                out.insert(IntervalLink::new((*x).clone(), r, (*y).clone()));
            }
        }
    }
    Ok(out)
}

fn entails(closed: &ClosedGraph, link: &IntervalLink) -> bool {
    quad_between(closed, &link.source, &link.target) == Some(link.relation.to_points())
}

/// A minimal subset of `links` with the same interval closure.
///
/// Candidates are visited in canonical order (source, target, relation) and
/// dropped whenever the remaining links still entail them, so the result is
/// deterministic. Output links are canonical and sorted.
pub fn transitive_reduction(links: &[IntervalLink]) -> Result<Vec<IntervalLink>, InconsistencyError> {
    let canonical: BTreeSet<IntervalLink> = links.iter().map(IntervalLink::canonical).collect();
    let candidates: Vec<IntervalLink> = canonical.into_iter().collect();
    // Surface inconsistency up front.
    ClosedGraph::build(&links_to_point_graph(&candidates, IntervalBounds::Strict)?)?;

    let mut keep = vec![true; candidates.len()];
    for idx in 0..candidates.len() {
        let rest = candidates
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != idx && keep[j])
            .map(|(_, l)| l);
        let g = links_to_point_graph(rest, IntervalBounds::Strict)?;
        let closed = ClosedGraph::build(&g)?;
        if entails(&closed, &candidates[idx]) {
            keep[idx] = false;
        }
    }
    Ok(candidates
        .into_iter()
        .zip(keep)
        .filter_map(|(l, k)| k.then_some(l))
        .collect())
}
