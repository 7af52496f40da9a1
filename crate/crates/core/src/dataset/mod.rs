//! Point- and interval-level training sets: conversion, inverse and closure
//! augmentation, `<`/`>` rebalancing and per-cell statistics.

mod augment;
mod examples;
mod io;
mod stats;

pub use augment::{
    augment_closure, augment_closure_with, augment_interval_closure, augment_inverse, build_training_sets,
    intervals_to_points, rebalance_lt_gt, Augmentable, DatasetFamily, TrainingSets,
};
pub use examples::{interval_examples, IntervalExample, PointExample, Provenance};
pub use io::{
    read_interval_dataset, read_jsonl, read_point_dataset, stats_path, write_interval_dataset, write_jsonl,
    write_point_dataset, DatasetError,
    IntervalRecord, PointRecord,
};
pub use stats::{dataset_stats, interval_stats, IntervalStats, PointStats};
