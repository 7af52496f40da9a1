use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ifp_core::synth::{generate_documents, write_layout, SynthConfig};
use serde_json::Value;

fn ifp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ifp")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn corpus() -> (tempfile::TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().join("corpus");
    let train = generate_documents(&SynthConfig { documents: 10, seed: 1, ..Default::default() });
    let test = generate_documents(&SynthConfig { documents: 4, seed: 2, ..Default::default() });
    write_layout(&root, &train, &test).unwrap();
    (dir, root)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn sidecar(path: &Path) -> Value {
    let text = std::fs::read_to_string(path.with_extension("stats.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(code(&ifp(&[])), 1);
    assert_eq!(code(&ifp(&["convert", "--bogus"])), 1);
    assert_eq!(code(&ifp(&["decode", "--root", ".", "--predictor", "gpt", "--out", "x"])), 1);
    assert_eq!(code(&ifp(&["--help"])), 0);
}

#[test]
fn empty_corpus_is_a_data_error_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::create_dir_all(dir.path().join("corpus/train")).unwrap();
    let out = dir.path().join("out");
    let r = ifp(&["convert", "--root", s(&dir.path().join("corpus")), "--out", s(&out)]);
    assert_eq!(code(&r), 2, "{}", String::from_utf8_lossy(&r.stderr));
    assert!(!out.exists());
}

#[test]
fn convert_then_augment() {
    let (dir, root) = corpus();
    let out = dir.path().join("data");
    let r = ifp(&["convert", "--root", s(&root), "--out", s(&out)]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    let raw = out.join("train.points.R.jsonl");
    assert!(raw.exists() && out.join("train.intervals.R.jsonl").exists());
    assert_eq!(sidecar(&raw)["meta"]["args"]["split_seed"], 2013);

    assert_eq!(code(&ifp(&["augment", "--input", s(&raw)])), 0);
    let c = sidecar(&out.join("train.points.C.jsonl"));
    let ic = sidecar(&out.join("train.points.IC.jsonl"));
    assert_eq!(ic["examples"].as_u64().unwrap(), 2 * c["examples"].as_u64().unwrap());
    for key in ["SS", "SE", "ES", "EE"] {
        for rel in ["<", "=", ">"] {
            let mirror = match rel {
                "<" => ">",
                ">" => "<",
                _ => "=",
            };
            let swapped: String = key.chars().rev().collect();
            assert_eq!(
                ic["counts"][key][rel].as_u64().unwrap(),
                c["counts"][key][rel].as_u64().unwrap() + c["counts"][&swapped][mirror].as_u64().unwrap()
            );
        }
    }

    let r = ifp(&["augment", "--input", s(&out.join("train.intervals.R.jsonl")), "--level", "interval"]);
    assert_eq!(code(&r), 0);
    assert!(out.join("train.intervals.IC.jsonl").exists());
    let r = ifp(&["stats", "--input", s(&raw), "--json"]);
    let counts: Value = serde_json::from_slice(&r.stdout).unwrap();
    assert_eq!(counts, sidecar(&raw)["counts"]);
}

#[test]
fn oracle_decode_scores_perfectly() {
    let (dir, root) = corpus();
    let preds = dir.path().join("preds.jsonl");
    let r = ifp(&["decode", "--root", s(&root), "--split", "test", "--predictor", "oracle:noise=0", "--out", s(&preds)]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    let report = dir.path().join("report");
    let r = ifp(&[
        "evaluate", "--root", s(&root), "--split", "test", "--predictions", s(&preds), "--out", s(&report),
        "--resamples", "100", "--svg",
    ]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    let records: Vec<Value> = std::fs::read_to_string(report.join("report.jsonl"))
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    let find = |name: &str| records.iter().find(|r| r["record"] == name).unwrap()["value"].clone();
    assert_eq!(find("accuracy"), 1.0);
    assert_eq!(find("temporal_awareness")["f_a"], 1.0);
    assert_eq!(find("config")["args"]["predictions"], s(&preds));
    assert!(report.join("calibration.csv").exists() && report.join("calibration.svg").exists());

    let cal = dir.path().join("cal");
    let r = ifp(&["calibrate", "--root", s(&root), "--split", "test", "--predictions", s(&preds), "--out", s(&cal)]);
    assert_eq!(code(&r), 0);
    assert!(cal.join("calibration.json").exists());
}

#[test]
fn majority_point_predictor_gives_one_label() {
    let (dir, root) = corpus();
    let preds = dir.path().join("preds.jsonl");
    let r = ifp(&["decode", "--root", s(&root), "--split", "test", "--predictor", "majority:<", "--out", s(&preds)]);
    assert_eq!(code(&r), 0);
    let labels: std::collections::BTreeSet<String> = std::fs::read_to_string(&preds)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str::<Value>(l).unwrap()["predicted_relation"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(labels.len(), 1);

    // Needs a training set to pick the label.
    let r = ifp(&["decode", "--root", s(&root), "--split", "test", "--predictor", "majority", "--out", s(&preds)]);
    assert_eq!(code(&r), 1);
}

#[test]
fn file_predictor_round_trip_and_missing_queries() {
    let (dir, root) = corpus();
    let queries = dir.path().join("queries.jsonl");
    let r = ifp(&["encode", "--root", s(&root), "--split", "test", "--out", s(&queries)]);
    assert_eq!(code(&r), 0);
    let probs = dir.path().join("probs.jsonl");
    let lines: Vec<String> = std::fs::read_to_string(&queries)
        .unwrap()
        .lines()
        .map(|l| {
            let q: Value = serde_json::from_str(l).unwrap();
            serde_json::json!({"query_id": q["query_id"], "p_before": 0.5, "p_equal": 0.2, "p_after": 0.3}).to_string()
        })
        .collect();
    std::fs::write(&probs, lines.join("\n") + "\n").unwrap();
    let spec = format!("file:{}", s(&probs));
    let preds = dir.path().join("preds.jsonl");
    let r = ifp(&["decode", "--root", s(&root), "--split", "test", "--predictor", &spec, "--out", s(&preds)]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));

    std::fs::write(&probs, lines[1..].join("\n") + "\n").unwrap();
    let r = ifp(&["decode", "--root", s(&root), "--split", "test", "--predictor", &spec, "--out", s(&preds)]);
    assert_eq!(code(&r), 2);
}

#[test]
fn point_level_decode_and_evaluate() {
    let (dir, root) = corpus();
    let preds = dir.path().join("points.jsonl");
    let r = ifp(&[
        "decode", "--root", s(&root), "--split", "test", "--level", "point", "--predictor", "random",
        "--predictor-seed", "3", "--out", s(&preds),
    ]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    let r = ifp(&[
        "evaluate", "--root", s(&root), "--split", "test", "--level", "point", "--predictions", s(&preds),
        "--out", s(&dir.path().join("rep")), "--resamples", "0",
    ]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
}
