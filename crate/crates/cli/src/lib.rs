//! Batch front-end for `ifp-core`.
//!
//! Every command is deterministic given its arguments; each output carries the
//! resolved configuration (minus the output location) so runs can be replayed.

mod predictor;

use std::collections::HashMap;
use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, warn};
use serde::Serialize;
use serde_json::{json, Value};

use ifp_core::algebra::InconsistencyError;
use ifp_core::corpus::{load_corpus, CorpusOptions, Document, Split, DEFAULT_SPLIT_SEED};
use ifp_core::dataset::{
    augment_closure, augment_interval_closure, augment_inverse, dataset_stats, interval_examples, interval_stats,
    intervals_to_points, read_interval_dataset, read_jsonl, read_point_dataset, rebalance_lt_gt, write_interval_dataset,
    write_jsonl, write_point_dataset,
};
use ifp_core::decoder::{
    baseline_predictions, classify_documents, predict_points, DecodeError, PointPredictionRecord, PredictionRecord,
    RelationSet,
};
use ifp_core::encoding::{pair_queries, tag_interval_pair, tag_point_pair, write_queries, Direction, TaggedQuery};
use ifp_core::eval::{
    evaluate_intervals, evaluate_points, render_svg, write_calibration_csv, EvalError, EvalOptions, EvalReport,
    DEFAULT_BINS, DEFAULT_LEVEL, DEFAULT_RESAMPLES,
};

pub use predictor::PredictorSpec;

/// Exit status for malformed invocations.
pub const EXIT_USAGE: u8 = 1;
/// Exit status for unreadable, missing or malformed data.
pub const EXIT_DATA: u8 = 2;
/// Exit status when the pipeline contradicts itself.
pub const EXIT_INTERNAL: u8 = 3;

/// An invocation that parses but cannot be carried out as asked.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Parser, Debug)]
#[command(name = "ifp", version, about = "Interval relations from point relations: datasets, decoding, evaluation")]
pub struct Cli {
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    /// Suppress summaries on stdout.
    #[arg(short, long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Convert a TimeML split into Raw point and interval datasets.
    Convert(ConvertArgs),
    /// Derive Inverse, Closure or Inverse & Closure sets from a Raw dataset.
    Augment(AugmentArgs),
    /// Print per-cell counts of a dataset file.
    Stats(StatsArgs),
    /// Write tagged queries for the point model.
    Encode(EncodeArgs),
    /// Label every annotated pair of a split with a predictor.
    Decode(DecodeArgs),
    /// Score predictions against the gold split.
    Evaluate(EvaluateArgs),
    /// Calibration curves and ECE of scored predictions.
    Calibrate(CalibrateArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CorpusArgs {
    /// Corpus root with training and test TimeML directories.
    #[arg(long)]
    pub root: PathBuf,
    #[arg(long, default_value_t = Split::Train)]
    pub split: Split,
    /// Seed of the train/validation partition.
    #[arg(long, default_value_t = DEFAULT_SPLIT_SEED)]
    pub split_seed: u64,
    /// Fail on the first unparseable file instead of skipping it.
    #[arg(long)]
    pub strict: bool,
    /// Validation document ids, one per line; overrides the seeded partition.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

impl CorpusArgs {
    fn load(&self) -> Result<Vec<Document>> {
        let options =
            CorpusOptions { split_seed: self.split_seed, strict: self.strict, manifest: self.manifest.clone() };
        let loaded = load_corpus(&self.root, self.split, &options)?;
        if !loaded.failures.is_empty() {
            warn!("{} file(s) failed to parse and were skipped", loaded.failures.len());
        }
        if loaded.documents.is_empty() {
            bail!(
                "no {} documents under {} ({} unparseable)",
                self.split,
                self.root.display(),
                loaded.failures.len()
            );
        }
        info!("loaded {} {} documents", loaded.documents.len(), self.split);
        Ok(loaded.documents)
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Point,
    Interval,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Inverse,
    Closure,
    Both,
}

#[derive(Args, Debug, Serialize)]
pub struct ConvertArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub corpus: CorpusArgs,
    /// Output directory.
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct AugmentArgs {
    /// Raw dataset written by `convert`.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = Level::Point)]
    pub level: Level,
    #[arg(long, value_enum, default_value_t = Strategy::Both)]
    pub strategy: Strategy,
    /// Seed of the `<`/`>` rebalancing of closure-derived point examples.
    #[arg(long, default_value_t = 0)]
    pub rebalance_seed: u64,
    /// Output directory (default: next to the input).
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct StatsArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = Level::Point)]
    pub level: Level,
    /// Print JSON instead of a table.
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct EncodeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub corpus: CorpusArgs,
    #[arg(long, value_enum, default_value_t = Level::Point)]
    pub level: Level,
    /// Encode the forward query of each example of this point dataset instead
    /// of the eight decoder queries of every annotated pair.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct DecodeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub corpus: CorpusArgs,
    /// random | prior | majority[:<label>] | oracle[:noise=f] | file:<path> |
    /// interval-random | interval-majority[:<relation>]
    #[arg(long)]
    pub predictor: PredictorSpec,
    /// Training dataset for `majority`, `prior` and `interval-majority`.
    #[arg(long)]
    pub train: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub predictor_seed: u64,
    /// full (13 relations) or observed (11, no overlaps).
    #[arg(long, default_value_t = RelationSet::Full)]
    pub relation_set: RelationSet,
    /// `interval` decodes pair relations; `point` answers endpoint queries directly.
    #[arg(long, value_enum, default_value_t = Level::Interval)]
    pub level: Level,
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ScoringArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub corpus: CorpusArgs,
    /// Predictions written by `decode`.
    #[arg(long)]
    pub predictions: PathBuf,
    #[arg(long, value_enum, default_value_t = Level::Interval)]
    pub level: Level,
    #[arg(long, default_value_t = RelationSet::Full)]
    pub relation_set: RelationSet,
    /// Equal-count bins per label.
    #[arg(long, default_value_t = DEFAULT_BINS)]
    pub bins: usize,
    /// Also render calibration curves as SVG.
    #[arg(long)]
    pub svg: bool,
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct EvaluateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub scoring: ScoringArgs,
    /// Bootstrap resamples; 0 disables confidence intervals.
    #[arg(long, default_value_t = DEFAULT_RESAMPLES)]
    pub resamples: usize,
    #[arg(long, default_value_t = DEFAULT_LEVEL)]
    pub confidence: f64,
    #[arg(long, default_value_t = 0)]
    pub bootstrap_seed: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct CalibrateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub scoring: ScoringArgs,
}

/// Exit status for a failed run, from the most specific cause in the chain.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<UsageError>() || cause.is::<clap::Error>() {
            return EXIT_USAGE;
        }
        if cause.is::<InconsistencyError>() {
            return EXIT_INTERNAL;
        }
        if let Some(DecodeError::DegenerateScores) = cause.downcast_ref::<DecodeError>() {
            return EXIT_INTERNAL;
        }
        if let Some(EvalError::LengthMismatch { .. }) = cause.downcast_ref::<EvalError>() {
            return EXIT_INTERNAL;
        }
    }
    EXIT_DATA
}

pub fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new().filter_level(level).parse_default_env().try_init();
}

fn set_workers(workers: Option<usize>) -> Result<()> {
    let Some(n) = workers else { return Ok(()) };
    if n == 0 {
        bail!(UsageError("--workers must be at least 1".into()));
    }
    #[cfg(feature = "parallel")]
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
        log::debug!("worker pool already configured: {e}");
    }
    #[cfg(not(feature = "parallel"))]
    warn!("built without the `parallel` feature; --workers {n} ignored");
    Ok(())
}

fn config<A: Serialize>(command: &str, args: &A) -> Value {
    json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "args": args,
    })
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(path, &text)
}

/// `X.jsonl` -> `X.run.json`.
fn run_path(path: &Path) -> PathBuf {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("output");
    let stem = name.strip_suffix(".jsonl").unwrap_or(name);
    path.with_file_name(format!("{stem}.run.json"))
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit status.
pub fn execute<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
        }
    };
    init_logging(cli.verbose);
    let result = if cli.quiet {
        run(cli, &mut std::io::sink())
    } else {
        run(cli, &mut std::io::stdout().lock())
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code(&e)
        }
    }
}

/// Runs a parsed command, writing summaries to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    set_workers(cli.workers)?;
    match cli.command {
        Command::Convert(a) => convert(&a, out),
        Command::Augment(a) => augment(&a, out),
        Command::Stats(a) => stats(&a, out),
        Command::Encode(a) => encode(&a, out),
        Command::Decode(a) => decode(&a, out),
        Command::Evaluate(a) => evaluate(&a, out),
        Command::Calibrate(a) => calibrate(&a, out),
    }
}

fn convert(args: &ConvertArgs, out: &mut dyn Write) -> Result<()> {
    let docs = args.corpus.load()?;
    let meta = config("convert", args);
    let points = intervals_to_points(&docs);
    let intervals = interval_examples(&docs);
    create_dir(&args.out)?;
    let split = args.corpus.split;
    let point_path = args.out.join(format!("{split}.points.R.jsonl"));
    let interval_path = args.out.join(format!("{split}.intervals.R.jsonl"));
    write_point_dataset(&point_path, &points, &meta)?;
    write_interval_dataset(&interval_path, &intervals, &meta)?;
    writeln!(out, "{} documents, {} point examples, {} interval examples", docs.len(), points.len(), intervals.len())?;
    write!(out, "{}", dataset_stats(&points))?;
    writeln!(out, "wrote {} and {}", point_path.display(), interval_path.display())?;
    Ok(())
}

/// `dir/train.points.R.jsonl` -> (`dir`, `train.points`).
fn output_prefix(input: &Path, out: Option<&Path>) -> (PathBuf, String) {
    let name = input.file_name().and_then(|n| n.to_str()).unwrap_or("dataset");
    let stem = name.strip_suffix(".jsonl").unwrap_or(name);
    let prefix = stem.strip_suffix(".R").unwrap_or(stem).to_string();
    let dir = match out {
        Some(d) => d.to_path_buf(),
        None => input.parent().map(Path::to_path_buf).unwrap_or_default(),
    };
    (dir, prefix)
}

fn augment(args: &AugmentArgs, out: &mut dyn Write) -> Result<()> {
    let meta = config("augment", args);
    let (dir, prefix) = output_prefix(&args.input, args.out.as_deref());
    create_dir(&dir)?;
    let inverse = matches!(args.strategy, Strategy::Inverse | Strategy::Both);
    let closure = matches!(args.strategy, Strategy::Closure | Strategy::Both);
    let path = |tag: &str| dir.join(format!("{prefix}.{tag}.jsonl"));
    let mut written = Vec::new();
    match args.level {
        Level::Point => {
            let raw = read_point_dataset(&args.input)?;
            if inverse {
                let set = augment_inverse(&raw);
                write_point_dataset(&path("I"), &set, &meta)?;
                written.push(("I", set.len(), path("I")));
            }
            if closure {
                let c = rebalance_lt_gt(&augment_closure(&raw), args.rebalance_seed);
                write_point_dataset(&path("C"), &c, &meta)?;
                written.push(("C", c.len(), path("C")));
                if inverse {
                    let ic = augment_inverse(&c);
                    write_point_dataset(&path("IC"), &ic, &meta)?;
                    written.push(("IC", ic.len(), path("IC")));
                }
            }
        }
        Level::Interval => {
            let raw = read_interval_dataset(&args.input)?;
            if inverse {
                let set = augment_inverse(&raw);
                write_interval_dataset(&path("I"), &set, &meta)?;
                written.push(("I", set.len(), path("I")));
            }
            if closure {
                let c = augment_interval_closure(&raw);
                write_interval_dataset(&path("C"), &c, &meta)?;
                written.push(("C", c.len(), path("C")));
                if inverse {
                    let ic = augment_inverse(&c);
                    write_interval_dataset(&path("IC"), &ic, &meta)?;
                    written.push(("IC", ic.len(), path("IC")));
                }
            }
        }
    }
    for (tag, n, p) in written {
        writeln!(out, "{tag:>2}: {n} examples -> {}", p.display())?;
    }
    Ok(())
}

fn stats(args: &StatsArgs, out: &mut dyn Write) -> Result<()> {
    match args.level {
        Level::Point => {
            let s = dataset_stats(&read_point_dataset(&args.input)?);
            if args.json {
                writeln!(out, "{}", serde_json::to_string_pretty(&s)?)?;
            } else {
                write!(out, "{s}")?;
            }
        }
        Level::Interval => {
            let s = interval_stats(&read_interval_dataset(&args.input)?);
            if args.json {
                writeln!(out, "{}", serde_json::to_string_pretty(&s.counts)?)?;
            } else {
                write!(out, "{s}")?;
            }
        }
    }
    Ok(())
}

fn doc_index(docs: &[Document]) -> HashMap<&str, &Document> {
    docs.iter().map(|d| (d.id.as_str(), d)).collect()
}

fn encode(args: &EncodeArgs, out: &mut dyn Write) -> Result<()> {
    let docs = args.corpus.load()?;
    let mut queries: Vec<TaggedQuery> = Vec::new();
    match (args.level, &args.dataset) {
        (Level::Point, Some(path)) => {
            let by_id = doc_index(&docs);
            for e in read_point_dataset(path)? {
                let doc = by_id
                    .get(e.doc_id.as_str())
                    .ok_or_else(|| DecodeError::UnknownDocument(e.doc_id.clone()))?;
                queries.push(tag_point_pair(doc, &e.source, &e.target, Direction::Forward)?);
            }
        }
        (Level::Point, None) => {
            for doc in &docs {
                for l in &doc.tlinks {
                    for (_, fwd, swp) in pair_queries(doc, &l.source, &l.target)? {
                        queries.push(fwd);
                        queries.push(swp);
                    }
                }
            }
        }
        (Level::Interval, Some(_)) => bail!(UsageError("--dataset applies to point queries only".into())),
        (Level::Interval, None) => {
            for doc in &docs {
                for l in &doc.tlinks {
                    queries.push(tag_interval_pair(doc, &l.source, &l.target)?);
                }
            }
        }
    }
    if let Some(parent) = args.out.parent() {
        create_dir(parent)?;
    }
    let n = write_queries(&args.out, &queries)?;
    write_json(&run_path(&args.out), &json!({"config": config("encode", args), "queries": n}))?;
    writeln!(out, "{n} queries -> {}", args.out.display())?;
    Ok(())
}

fn decode(args: &DecodeArgs, out: &mut dyn Write) -> Result<()> {
    let docs = args.corpus.load()?;
    let seed = args.predictor_seed;
    let train = args.train.as_deref();
    if let Some(parent) = args.out.parent() {
        create_dir(parent)?;
    }
    let n = match args.level {
        Level::Interval => {
            let preds: Vec<PredictionRecord> = if args.predictor.is_interval_baseline() {
                let baseline = args.predictor.interval_baseline(train, seed, args.relation_set)?;
                baseline_predictions(&docs, &baseline)
            } else {
                let p = args.predictor.point_predictor(&docs, train, seed)?;
                info!("decoding with {}", p.name());
                classify_documents(&docs, p.as_ref(), args.relation_set)?
            };
            write_jsonl(&args.out, &preds)?;
            preds.len()
        }
        Level::Point => {
            let p = args.predictor.point_predictor(&docs, train, seed)?;
            let examples = intervals_to_points(&docs);
            let preds = predict_points(&docs, &examples, p.as_ref())?;
            write_jsonl(&args.out, &preds)?;
            preds.len()
        }
    };
    write_json(&run_path(&args.out), &json!({"config": config("decode", args), "predictions": n}))?;
    writeln!(out, "{n} predictions -> {}", args.out.display())?;
    Ok(())
}

fn score<L>(scoring: &ScoringArgs, report: &EvalReport<L>, full: bool, out: &mut dyn Write) -> Result<()>
where
    L: fmt::Display + Serialize,
{
    create_dir(&scoring.out)?;
    if full {
        write_text(&scoring.out.join("report.txt"), &report.to_text())?;
        write_text(&scoring.out.join("report.jsonl"), &report.to_jsonl())?;
        write!(out, "{}", report.to_text())?;
    }
    match &report.calibration {
        Some(cal) => {
            let csv = scoring.out.join("calibration.csv");
            write_calibration_csv(&csv, cal).with_context(|| format!("writing {}", csv.display()))?;
            if scoring.svg {
                write_text(&scoring.out.join("calibration.svg"), &render_svg(cal))?;
            }
            if !full {
                write_json(&scoring.out.join("calibration.json"), &json!({"config": report.config, "calibration": cal}))?;
                writeln!(out, "ECE {:.4} over {} examples ({} bins)", cal.ece, cal.examples, cal.bins)?;
                for l in &cal.labels {
                    writeln!(out, "  {:<14} support {:>6}  ECE {:.4}", l.label.to_string(), l.support, l.ece)?;
                }
            }
        }
        None if !full => bail!("predictions carry no usable scores; nothing to calibrate"),
        None => {}
    }
    Ok(())
}

fn run_scoring(scoring: &ScoringArgs, options: &EvalOptions, meta: Value, full: bool, out: &mut dyn Write) -> Result<()> {
    let docs = scoring.corpus.load()?;
    match scoring.level {
        Level::Interval => {
            let preds: Vec<PredictionRecord> = read_jsonl(&scoring.predictions)?;
            let report = evaluate_intervals(&docs, &preds, options, meta)?;
            score(scoring, &report, full, out)
        }
        Level::Point => {
            let gold = intervals_to_points(&docs);
            let preds: Vec<PointPredictionRecord> = read_jsonl(&scoring.predictions)?;
            let report = evaluate_points(&gold, &preds, options, meta)?;
            score(scoring, &report, full, out)
        }
    }
}

fn evaluate(args: &EvaluateArgs, out: &mut dyn Write) -> Result<()> {
    let options = EvalOptions {
        relations: args.scoring.relation_set,
        resamples: args.resamples,
        level: args.confidence,
        seed: args.bootstrap_seed,
        bins: args.scoring.bins,
    };
    if !(0.0 < options.level && options.level < 1.0) {
        bail!(UsageError(format!("--confidence {} outside (0, 1)", options.level)));
    }
    run_scoring(&args.scoring, &options, config("evaluate", args), true, out)
}

fn calibrate(args: &CalibrateArgs, out: &mut dyn Write) -> Result<()> {
    let options = EvalOptions {
        relations: args.scoring.relation_set,
        resamples: 0,
        bins: args.scoring.bins,
        ..EvalOptions::default()
    };
    run_scoring(&args.scoring, &options, config("calibrate", args), false, out)
}
