use std::borrow::Borrow;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::relation::{compose_points, PointRelation, Side};

/// Opaque identifier of a temporal entity within one document.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EntityId(String);

impl EntityId {
    pub fn new(id: impl Into<String>) -> Self {
        let id = id.into();
        assert!(!id.is_empty(), "entity ids must be non-empty");
        EntityId(id)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn start(&self) -> PointEndpoint {
        PointEndpoint::new(self.clone(), Side::Start)
    }

    pub fn end(&self) -> PointEndpoint {
        PointEndpoint::new(self.clone(), Side::End)
    }
}

impl From<&str> for EntityId {
    fn from(s: &str) -> Self {
        EntityId::new(s)
    }
}

impl From<String> for EntityId {
    fn from(s: String) -> Self {
        EntityId::new(s)
    }
}

impl Borrow<str> for EntityId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Start or end point of an entity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PointEndpoint {
    pub entity: EntityId,
    pub side: Side,
}

impl PointEndpoint {
    pub fn new(entity: impl Into<EntityId>, side: Side) -> Self {
        PointEndpoint { entity: entity.into(), side }
    }

    /// The other endpoint of the same entity.
    pub fn sibling(&self) -> Self {
        let side = match self.side {
            Side::Start => Side::End,
            Side::End => Side::Start,
        };
        PointEndpoint { entity: self.entity.clone(), side }
    }
}

impl fmt::Display for PointEndpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", self.entity, self.side)
    }
}

/// A single `(source, relation, target)` fact between endpoints.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PointStatement {
    pub source: PointEndpoint,
    pub relation: PointRelation,
    pub target: PointEndpoint,
}

impl PointStatement {
    pub fn new(source: PointEndpoint, relation: PointRelation, target: PointEndpoint) -> Self {
        PointStatement { source, relation, target }
    }

    pub fn inverse(&self) -> Self {
        PointStatement {
            source: self.target.clone(),
            relation: self.relation.invert(),
            target: self.source.clone(),
        }
    }

    /// Same fact oriented so that `source < target` in endpoint order.
    pub fn canonical(&self) -> Self {
        if self.source <= self.target {
            self.clone()
        } else {
            self.inverse()
        }
    }
}

impl fmt::Display for PointStatement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.source, self.relation, self.target)
    }
}

/// Two contradictory relations were asserted or derived for the same endpoint pair.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("inconsistent relations between {from} and {to}: {existing} vs derived {derived}")]
pub struct InconsistencyError {
    pub from: PointEndpoint,
    pub to: PointEndpoint,
    pub existing: PointRelation,
    pub derived: PointRelation,
}

/// Definite point relations over a set of endpoints.
///
/// Each unordered pair is stored once, under `(a, b)` with `a < b`; the
/// reverse direction is read through [`PointRelation::invert`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PointGraph {
    points: BTreeSet<PointEndpoint>,
    edges: BTreeMap<(PointEndpoint, PointEndpoint), PointRelation>,
}

impl PointGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_statements<I>(statements: I) -> Result<Self, InconsistencyError>
    where
        I: IntoIterator<Item = PointStatement>,
    {
        let mut g = PointGraph::new();
        for s in statements {
            g.insert(s)?;
        }
        Ok(g)
    }

    pub fn add_point(&mut self, p: PointEndpoint) {
        self.points.insert(p);
    }

    /// Adds `start < end` for `entity`.
    pub fn add_interval_bounds(&mut self, entity: &EntityId) -> Result<(), InconsistencyError> {
        self.insert(PointStatement::new(entity.start(), PointRelation::Before, entity.end()))
            .map(|_| ())
    }

    /// Inserts a statement; returns whether the fact was new.
    pub fn insert(&mut self, s: PointStatement) -> Result<bool, InconsistencyError> {
        if s.source == s.target {
            return if s.relation == PointRelation::Equal {
                self.points.insert(s.source);
                Ok(false)
            } else {
                Err(InconsistencyError {
                    from: s.source.clone(),
                    to: s.target,
                    existing: PointRelation::Equal,
                    derived: s.relation,
                })
            };
        }
        let c = s.canonical();
        self.points.insert(c.source.clone());
        self.points.insert(c.target.clone());
        match self.edges.get(&(c.source.clone(), c.target.clone())) {
            Some(&existing) if existing == c.relation => Ok(false),
            Some(&existing) => Err(InconsistencyError {
                from: c.source,
                to: c.target,
                existing,
                derived: c.relation,
            }),
            None => {
                self.edges.insert((c.source, c.target), c.relation);
                Ok(true)
            }
        }
    }

    pub fn relation(&self, a: &PointEndpoint, b: &PointEndpoint) -> Option<PointRelation> {
        if a == b {
            return self.points.contains(a).then_some(PointRelation::Equal);
        }
        if a < b {
            self.edges.get(&(a.clone(), b.clone())).copied()
        } else {
            self.edges.get(&(b.clone(), a.clone())).map(|r| r.invert())
        }
    }

    pub fn points(&self) -> impl Iterator<Item = &PointEndpoint> {
        self.points.iter()
    }

    pub fn point_count(&self) -> usize {
        self.points.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Stored facts in canonical orientation and order.
    pub fn statements(&self) -> impl Iterator<Item = PointStatement> + '_ {
        self.edges
            .iter()
            .map(|((a, b), &r)| PointStatement::new(a.clone(), r, b.clone()))
    }

    pub fn closure(&self) -> Result<PointGraph, InconsistencyError> {
        let closed = ClosedGraph::build(self)?;
        Ok(closed.into_graph())
    }
}

/// Least fixed point of `g` under composition and inversion.
pub fn point_closure(g: &PointGraph) -> Result<PointGraph, InconsistencyError> {
    g.closure()
}

/// Dense closure result, indexed by endpoint position in sorted order.
pub(crate) struct ClosedGraph {
    points: Vec<PointEndpoint>,
    rel: Vec<Option<PointRelation>>,
}

impl ClosedGraph {
    pub(crate) fn build(g: &PointGraph) -> Result<Self, InconsistencyError> {
        let points: Vec<PointEndpoint> = g.points.iter().cloned().collect();
        let index: BTreeMap<&PointEndpoint, usize> =
            points.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let n = points.len();
        let mut state = Fixpoint {
            n,
            rel: vec![None; n * n],
            adj: vec![Vec::new(); n],
            queue: VecDeque::new(),
        };
        for ((a, b), &r) in &g.edges {
            state
                .set(index[a], index[b], r)
                .map_err(|e| e.resolve(&points))?;
        }
        state.run().map_err(|e| e.resolve(&points))?;
        Ok(ClosedGraph { points, rel: state.rel })
    }

    pub(crate) fn index_of(&self, p: &PointEndpoint) -> Option<usize> {
        self.points.binary_search(p).ok()
    }

    pub(crate) fn get(&self, i: usize, j: usize) -> Option<PointRelation> {
        if i == j {
            Some(PointRelation::Equal)
        } else {
            self.rel[i * self.points.len() + j]
        }
    }

    fn into_graph(self) -> PointGraph {
        let n = self.points.len();
        let mut edges = BTreeMap::new();
        for i in 0..n {
            for j in i + 1..n {
                if let Some(r) = self.rel[i * n + j] {
                    edges.insert((self.points[i].clone(), self.points[j].clone()), r);
                }
            }
        }
        PointGraph { points: self.points.into_iter().collect(), edges }
    }
}

struct Conflict {
    i: usize,
    j: usize,
    existing: PointRelation,
    derived: PointRelation,
}

impl Conflict {
    fn resolve(self, points: &[PointEndpoint]) -> InconsistencyError {
        InconsistencyError {
            from: points[self.i].clone(),
            to: points[self.j].clone(),
            existing: self.existing,
            derived: self.derived,
        }
    }
}

// Semi-naive propagation: each newly added edge is composed with every edge
// adjacent to either of its endpoints exactly once.
struct Fixpoint {
    n: usize,
    rel: Vec<Option<PointRelation>>,
    adj: Vec<Vec<usize>>,
    queue: VecDeque<(usize, usize)>,
}

impl Fixpoint {
    fn set(&mut self, i: usize, j: usize, r: PointRelation) -> Result<(), Conflict> {
        if i == j {
            return if r == PointRelation::Equal {
                Ok(())
            } else {
                Err(Conflict { i, j, existing: PointRelation::Equal, derived: r })
            };
        }
        match self.rel[i * self.n + j] {
            Some(existing) if existing == r => Ok(()),
            Some(existing) => Err(Conflict { i, j, existing, derived: r }),
            None => {
                self.rel[i * self.n + j] = Some(r);
                self.rel[j * self.n + i] = Some(r.invert());
                self.adj[i].push(j);
                self.adj[j].push(i);
                self.queue.push_back((i, j));
                Ok(())
            }
        }
    }

    fn run(&mut self) -> Result<(), Conflict> {
        while let Some((i, j)) = self.queue.pop_front() {
            let r = self.rel[i * self.n + j].expect("queued edge is set");
            // i -r- j -r2- k
            let mut idx = 0;
            while idx < self.adj[j].len() {
                let k = self.adj[j][idx];
                idx += 1;
                if k == i {
                    continue;
                }
                let r2 = self.rel[j * self.n + k].expect("adjacent edge is set");
                if let Some(c) = compose_points(r, r2) {
                    self.set(i, k, c)?;
                }
            }
            // k -r0- i -r- j
            let mut idx = 0;
            while idx < self.adj[i].len() {
                let k = self.adj[i][idx];
                idx += 1;
                if k == j {
                    continue;
                }
                let r0 = self.rel[k * self.n + i].expect("adjacent edge is set");
                if let Some(c) = compose_points(r0, r) {
                    self.set(k, j, c)?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use PointRelation::*;

    fn p(e: &str, side: Side) -> PointEndpoint {
        PointEndpoint::new(e, side)
    }

    fn st(a: PointEndpoint, r: PointRelation, b: PointEndpoint) -> PointStatement {
        PointStatement::new(a, r, b)
    }

    #[test]
    fn transitivity() {
        let g = PointGraph::from_statements([
            st(p("x", Side::Start), Before, p("y", Side::Start)),
            st(p("y", Side::Start), Before, p("z", Side::Start)),
        ])
        .unwrap();
        let c = point_closure(&g).unwrap();
        assert_eq!(c.relation(&p("x", Side::Start), &p("z", Side::Start)), Some(Before));
        assert_eq!(c.relation(&p("z", Side::Start), &p("x", Side::Start)), Some(After));
    }

    #[test]
    fn shared_start_infers_point_facts() {
        // x starts y, x starts z, plus entity bounds.
        let mut g = PointGraph::new();
        for other in ["y", "z"] {
            let quad = super::super::AllenRelation::Starts.to_points();
            for (key, &r) in quad.iter() {
                g.insert(st(p("x", key.x_side()), r, p(other, key.y_side()))).unwrap();
            }
        }
        for e in ["x", "y", "z"] {
            g.add_interval_bounds(&EntityId::from(e)).unwrap();
        }
        let c = g.closure().unwrap();
        assert_eq!(c.relation(&p("y", Side::Start), &p("z", Side::Start)), Some(Equal));
        assert_eq!(c.relation(&p("y", Side::Start), &p("z", Side::End)), Some(Before));
        assert_eq!(c.relation(&p("y", Side::End), &p("z", Side::Start)), Some(After));
        assert_eq!(c.relation(&p("y", Side::End), &p("z", Side::End)), None);
    }

    #[test]
    fn direct_conflict_is_rejected() {
        let mut g = PointGraph::new();
        g.insert(st(p("a", Side::Start), Before, p("b", Side::Start))).unwrap();
        let err = g.insert(st(p("b", Side::Start), Before, p("a", Side::Start))).unwrap_err();
        assert_eq!(err.existing, Before);
        assert_eq!(err.derived, After);
        assert!(g.insert(st(p("a", Side::Start), Before, p("a", Side::Start))).is_err());
    }

    #[test]
    fn cycle_is_inconsistent() {
        let g = PointGraph::from_statements([
            st(p("a", Side::Start), Before, p("b", Side::Start)),
            st(p("b", Side::Start), Before, p("c", Side::Start)),
            st(p("c", Side::Start), Equal, p("a", Side::Start)),
        ])
        .unwrap();
        assert!(g.closure().is_err());
    }

    #[test]
    fn storage_is_canonical() {
        let mut g = PointGraph::new();
        g.insert(st(p("b", Side::End), After, p("a", Side::Start))).unwrap();
        let stmts: Vec<_> = g.statements().collect();
        assert_eq!(stmts, vec![st(p("a", Side::Start), Before, p("b", Side::End))]);
        assert!(!g.insert(st(p("a", Side::Start), Before, p("b", Side::End))).unwrap());
    }
}
