use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::examples::{IntervalExample, PointExample, Provenance};
use super::stats::{dataset_stats, interval_stats};
use crate::algebra::{AllenRelation, EntityId, PointEndpoint, PointRelation, Side};

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: {source}")]
    Json { path: PathBuf, line: usize, source: serde_json::Error },
    #[error("{path}:{line}: {message}")]
    Invalid { path: PathBuf, line: usize, message: String },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DatasetError + '_ {
    move |source| DatasetError::Io { path: path.to_path_buf(), source }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointRecord {
    pub doc_id: String,
    pub source_entity: EntityId,
    pub source_side: Side,
    pub target_entity: EntityId,
    pub target_side: Side,
    pub relation: PointRelation,
    pub provenance: Provenance,
}

impl From<&PointExample> for PointRecord {
    fn from(e: &PointExample) -> Self {
        PointRecord {
            doc_id: e.doc_id.clone(),
            source_entity: e.source.entity.clone(),
            source_side: e.source.side,
            target_entity: e.target.entity.clone(),
            target_side: e.target.side,
            relation: e.relation,
            provenance: e.provenance,
        }
    }
}

impl From<PointRecord> for PointExample {
    fn from(r: PointRecord) -> Self {
        PointExample::new(
            r.doc_id,
            PointEndpoint::new(r.source_entity, r.source_side),
            r.relation,
            PointEndpoint::new(r.target_entity, r.target_side),
            r.provenance,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalRecord {
    pub doc_id: String,
    pub source_entity: EntityId,
    pub target_entity: EntityId,
    pub relation: AllenRelation,
    pub provenance: Provenance,
}

impl From<&IntervalExample> for IntervalRecord {
    fn from(e: &IntervalExample) -> Self {
        IntervalRecord {
            doc_id: e.doc_id.clone(),
            source_entity: e.source.clone(),
            target_entity: e.target.clone(),
            relation: e.relation,
            provenance: e.provenance,
        }
    }
}

impl From<IntervalRecord> for IntervalExample {
    fn from(r: IntervalRecord) -> Self {
        IntervalExample {
            doc_id: r.doc_id,
            source: r.source_entity,
            target: r.target_entity,
            relation: r.relation,
            provenance: r.provenance,
        }
    }
}

/// `points.jsonl` -> `points.stats.json`.
pub fn stats_path(path: &Path) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.stats.json"))
}

/// Writes one JSON object per line.
pub fn write_jsonl<T: Serialize>(path: &Path, records: impl IntoIterator<Item = T>) -> Result<(), DatasetError> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut out = BufWriter::new(file);
    for record in records {
        serde_json::to_writer(&mut out, &record)
            .map_err(|source| DatasetError::Json { path: path.to_path_buf(), line: 0, source })?;
        out.write_all(b"\n").map_err(io_err(path))?;
    }
    out.flush().map_err(io_err(path))
}

/// Reads one JSON object per non-blank line.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, DatasetError> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut records = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line)
            .map_err(|source| DatasetError::Json { path: path.to_path_buf(), line: i + 1, source })?;
        records.push(record);
    }
    Ok(records)
}

fn write_sidecar(path: &Path, value: &serde_json::Value) -> Result<(), DatasetError> {
    let sidecar = stats_path(path);
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|source| DatasetError::Json { path: sidecar.clone(), line: 0, source })?;
    text.push('\n');
    std::fs::write(&sidecar, text).map_err(io_err(&sidecar))
}

/// Writes the dataset and its stats sidecar. `meta` is embedded verbatim.
pub fn write_point_dataset(path: &Path, examples: &[PointExample], meta: &serde_json::Value) -> Result<(), DatasetError> {
    write_jsonl(path, examples.iter().map(PointRecord::from))?;
    let stats = dataset_stats(examples);
    write_sidecar(
        path,
        &serde_json::json!({
            "kind": "point",
            "examples": examples.len(),
            "counts": stats,
            "meta": meta,
        }),
    )
}

pub fn write_interval_dataset(
    path: &Path,
    examples: &[IntervalExample],
    meta: &serde_json::Value,
) -> Result<(), DatasetError> {
    write_jsonl(path, examples.iter().map(IntervalRecord::from))?;
    let stats = interval_stats(examples);
    write_sidecar(
        path,
        &serde_json::json!({
            "kind": "interval",
            "examples": examples.len(),
            "counts": stats.counts,
            "meta": meta,
        }),
    )
}

pub fn read_point_dataset(path: &Path) -> Result<Vec<PointExample>, DatasetError> {
    let records: Vec<PointRecord> = read_jsonl(path)?;
    records
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            if r.source_entity == r.target_entity && r.source_side == r.target_side {
                return Err(DatasetError::Invalid {
                    path: path.to_path_buf(),
                    line: i + 1,
                    message: "source and target are the same endpoint".into(),
                });
            }
            Ok(r.into())
        })
        .collect()
}

pub fn read_interval_dataset(path: &Path) -> Result<Vec<IntervalExample>, DatasetError> {
    let records: Vec<IntervalRecord> = read_jsonl(path)?;
    records
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            if r.source_entity == r.target_entity {
                return Err(DatasetError::Invalid {
                    path: path.to_path_buf(),
                    line: i + 1,
                    message: "source and target are the same entity".into(),
                });
            }
            Ok(r.into())
        })
        .collect()
}
