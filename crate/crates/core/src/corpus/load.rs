use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use log::warn;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use walkdir::WalkDir;

use super::model::Document;
use super::parse::{parse_tml_with_id, ParseError};
use crate::par;

/// Seed of the train/validation shuffle unless overridden.
pub const DEFAULT_SPLIT_SEED: u64 = 2013;

/// Share of training documents held out for validation.
pub const VALIDATION_FRACTION: f64 = 0.2;

const TRAIN_DIRS: &[&str] = &["train", "training", "TBAQ-cleaned", "TE3-Silver-data-train"];
const TEST_DIRS: &[&str] = &["test", "te3-platinum", "platinum"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Validation,
    Test,
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Split::Train => "train",
            Split::Validation => "validation",
            Split::Test => "test",
        })
    }
}

impl FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "train" => Ok(Split::Train),
            "validation" | "valid" | "dev" => Ok(Split::Validation),
            "test" => Ok(Split::Test),
            other => Err(format!("unknown split `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusOptions {
    pub split_seed: u64,
    /// Abort on the first file that fails to parse.
    pub strict: bool,
    /// File listing validation document ids, one per line; replaces the seeded split.
    pub manifest: Option<PathBuf>,
}

impl Default for CorpusOptions {
    fn default() -> Self {
        CorpusOptions { split_seed: DEFAULT_SPLIT_SEED, strict: false, manifest: None }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: ParseError,
    },
    #[error("no {kind} directory under {root} (looked for {candidates})")]
    Layout {
        root: PathBuf,
        kind: &'static str,
        candidates: String,
    },
}

#[derive(Debug)]
pub struct FileFailure {
    pub path: PathBuf,
    pub error: ParseError,
}

#[derive(Debug)]
pub struct LoadedCorpus {
    pub documents: Vec<Document>,
    pub failures: Vec<FileFailure>,
}

fn find_dir(root: &Path, candidates: &[&str], kind: &'static str) -> Result<PathBuf, CorpusError> {
    candidates
        .iter()
        .map(|c| root.join(c))
        .find(|p| p.is_dir())
        .ok_or_else(|| CorpusError::Layout {
            root: root.to_path_buf(),
            kind,
            candidates: candidates.join(", "),
        })
}

fn tml_files(dir: &Path) -> Result<Vec<PathBuf>, CorpusError> {
    let mut files = Vec::new();
    for entry in WalkDir::new(dir).sort_by_file_name() {
        let entry = entry.map_err(|e| CorpusError::Io {
            path: dir.to_path_buf(),
            source: e.into(),
        })?;
        if entry.file_type().is_file() && entry.path().extension().is_some_and(|x| x == "tml") {
            files.push(entry.into_path());
        }
    }
    Ok(files)
}

/// Parses every `.tml` file under `dir`, in path order.
pub fn load_dir(dir: &Path, strict: bool) -> Result<LoadedCorpus, CorpusError> {
    let files = tml_files(dir)?;
    let parsed = par::map(&files, |path| {
        let bytes = std::fs::read(path).map_err(|source| CorpusError::Io { path: path.clone(), source })?;
        let stem = path.file_stem().and_then(|s| s.to_str());
        Ok::<_, CorpusError>(parse_tml_with_id(&bytes, stem))
    });
    let mut documents = Vec::new();
    let mut failures = Vec::new();
    for (path, result) in files.into_iter().zip(parsed) {
        match result? {
            Ok(doc) => documents.push(doc),
            Err(error) if strict => return Err(CorpusError::Parse { path, source: error }),
            Err(error) => {
                warn!("skipping {}: {error}", path.display());
                failures.push(FileFailure { path, error });
            }
        }
    }
    Ok(LoadedCorpus { documents, failures })
}

/// Seeded 80/20 partition of document ids into (train, validation).
pub fn split_ids(ids: &[String], seed: u64) -> (BTreeSet<String>, BTreeSet<String>) {
    let mut sorted: Vec<String> = ids.to_vec();
    sorted.sort();
    sorted.dedup();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sorted.shuffle(&mut rng);
    let n_val = (sorted.len() as f64 * VALIDATION_FRACTION).round() as usize;
    let validation = sorted[..n_val].iter().cloned().collect();
    let train = sorted[n_val..].iter().cloned().collect();
    (train, validation)
}

fn read_manifest(path: &Path) -> Result<BTreeSet<String>, CorpusError> {
    let content = std::fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(content
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect())
}

/// Loads one split of a TempEval-3 style directory tree.
pub fn load_corpus(root: &Path, split: Split, options: &CorpusOptions) -> Result<LoadedCorpus, CorpusError> {
    if split == Split::Test {
        return load_dir(&find_dir(root, TEST_DIRS, "test")?, options.strict);
    }
    let mut loaded = load_dir(&find_dir(root, TRAIN_DIRS, "training")?, options.strict)?;
    let validation = match &options.manifest {
        Some(path) => read_manifest(path)?,
        None => {
            let ids: Vec<String> = loaded.documents.iter().map(|d| d.id.clone()).collect();
            split_ids(&ids, options.split_seed).1
        }
    };
    let want_validation = split == Split::Validation;
    loaded.documents.retain(|d| validation.contains(&d.id) == want_validation);
    Ok(loaded)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_is_a_seeded_partition() {
        let ids: Vec<String> = (0..57).map(|i| format!("doc{i}")).collect();
        let (train, val) = split_ids(&ids, 7);
        assert_eq!(val.len(), 11);
        assert_eq!(train.len() + val.len(), 57);
        assert!(train.is_disjoint(&val));
        assert_eq!(split_ids(&ids, 7), (train.clone(), val.clone()));
        assert_ne!(split_ids(&ids, 8).1, val);
        let mut reversed = ids.clone();
        reversed.reverse();
        assert_eq!(split_ids(&reversed, 7).1, val);
    }

    #[test]
    fn split_names() {
        assert_eq!("dev".parse(), Ok(Split::Validation));
        assert_eq!(Split::Test.to_string(), "test");
    }
}
