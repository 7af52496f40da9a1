//! Interval-from-point temporal relation toolkit.
//!
//! Interval annotations from TimeML corpora are decomposed into relations
//! between interval endpoints, augmented by inversion and temporal closure,
//! and decoded back into Allen relations from per-endpoint probabilities.
//!
//! - [`algebra`]: relation alphabets, decomposition, point-level closure.
//! - [`corpus`]: TimeML parsing and corpus splits.
//! - [`dataset`]: point and interval training sets and their statistics.
//! - [`encoding`]: tagged model inputs.
//! - [`decoder`]: combining, scoring and decoding point distributions.
//! - [`eval`]: accuracy, macro-F1, temporal awareness, calibration.

pub mod algebra;
pub mod corpus;
pub mod dataset;
pub mod decoder;
pub mod encoding;
pub mod eval;
pub mod par;
pub mod synth;
#[cfg(any(test, feature = "testing"))]
pub mod testing;
