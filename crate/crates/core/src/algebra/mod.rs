//! Relation alphabets, endpoint decomposition and point-level temporal reasoning.
//!
//! Interval relations are never composed directly: every interval fact is
//! lowered to its four endpoint relations, reasoned about with the point
//! algebra, and read back when all four endpoint relations are known.

mod graph;
mod interval;
mod relation;

pub use graph::{point_closure, EntityId, InconsistencyError, PointEndpoint, PointGraph, PointStatement};
pub use interval::{
    interval_closure, interval_closure_with, links_to_point_graph, transitive_reduction, IntervalBounds,
    IntervalLink,
};
pub use relation::{
    compose_points, interval_to_points, invert_interval, points_to_interval, swap_quad, AllenRelation,
    EndpointPairKey, PointQuad, PointRelation, Quad, Side, UnknownLabel,
};
