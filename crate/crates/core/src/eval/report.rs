use std::fmt::{Display, Write as _};
use std::path::Path;

use serde::Serialize;
use serde_json::json;

use super::{CalibrationReport, EvalReport};

impl<L: Display + Serialize> EvalReport<L> {
    /// Human-readable key-value report with nested tables.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "examples: {}", self.examples);
        let _ = writeln!(s, "accuracy: {:.4}", self.accuracy);
        let _ = writeln!(s, "macro_f1: {:.4}", self.macro_f1);
        if let Some(ta) = &self.temporal_awareness {
            let _ = writeln!(s, "temporal_awareness:");
            let _ = writeln!(s, "  precision: {:.4} ({}/{})", ta.precision, ta.precision_hits, ta.precision_total);
            let _ = writeln!(s, "  recall: {:.4} ({}/{})", ta.recall, ta.recall_hits, ta.recall_total);
            let _ = writeln!(s, "  f_a: {:.4}", ta.f_a);
            let _ = writeln!(s, "  inconsistent_documents: {}", ta.inconsistent_documents);
        }
        if !self.bootstrap.is_empty() {
            let _ = writeln!(s, "bootstrap:");
            for (metric, ci) in &self.bootstrap {
                let _ = writeln!(
                    s,
                    "  {metric}: [{:.4}, {:.4}] level={} resamples={} seed={}",
                    ci.low, ci.high, ci.level, ci.resamples, ci.seed
                );
            }
        }
        let _ = writeln!(s, "per_label:");
        let _ = writeln!(s, "  {:<14} {:>9} {:>9} {:>9} {:>8} {:>9}", "label", "precision", "recall", "f1", "support", "predicted");
        for l in &self.per_label {
            let _ = writeln!(
                s,
                "  {:<14} {:>9.4} {:>9.4} {:>9.4} {:>8} {:>9}",
                l.label.to_string(),
                l.precision,
                l.recall,
                l.f1,
                l.support,
                l.predicted
            );
        }
        if let Some(cal) = &self.calibration {
            let _ = writeln!(s, "calibration:");
            let _ = writeln!(s, "  bins: {}", cal.bins);
            let _ = writeln!(s, "  ece: {:.4}", cal.ece);
            for l in &cal.labels {
                let _ = writeln!(s, "  {:<14} ece={:.4} support={}", l.label.to_string(), l.ece, l.support);
            }
        }
        let _ = writeln!(s, "config: {}", self.config);
        s
    }

    /// One JSON record per metric.
    pub fn to_jsonl(&self) -> String {
        let mut records = vec![
            json!({"record": "config", "value": self.config}),
            json!({"record": "accuracy", "value": self.accuracy, "examples": self.examples}),
            json!({"record": "macro_f1", "value": self.macro_f1}),
        ];
        if let Some(ta) = &self.temporal_awareness {
            records.push(json!({"record": "temporal_awareness", "value": ta}));
        }
        for (metric, ci) in &self.bootstrap {
            records.push(json!({"record": "bootstrap", "metric": metric, "value": ci}));
        }
        for l in &self.per_label {
            records.push(json!({"record": "per_label", "value": l}));
        }
        if let Some(cal) = &self.calibration {
            records.push(json!({"record": "calibration", "value": cal}));
        }
        let mut out = String::new();
        for r in records {
            out.push_str(&r.to_string());
            out.push('\n');
        }
        out
    }
}

/// `label,bin,mean_confidence,positive_fraction,count` rows.
pub fn write_calibration_csv<L: Display>(path: &Path, report: &CalibrationReport<L>) -> std::io::Result<()> {
    let mut s = String::from("label,bin,mean_confidence,positive_fraction,count\n");
    for l in &report.labels {
        for b in &l.curve {
            let _ = writeln!(s, "{},{},{},{},{}", l.label, b.bin, b.mean_confidence, b.positive_fraction, b.count);
        }
    }
    std::fs::write(path, s)
}

const PALETTE: [&str; 13] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
    "#393b79", "#637939", "#843c39",
];

/// Reliability diagram: one polyline per label against the diagonal.
pub fn render_svg<L: Display>(report: &CalibrationReport<L>) -> String {
    let (w, h, m) = (420.0, 420.0, 40.0);
    let x = |v: f64| m + v * (w - 2.0 * m);
    let y = |v: f64| h - m - v * (h - 2.0 * m);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(s, r#"<rect x="{m}" y="{m}" width="{}" height="{}" fill="none" stroke="black"/>"#, w - 2.0 * m, h - 2.0 * m);
    let _ = writeln!(s, r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="gray" stroke-dasharray="4"/>"#, x(0.0), y(0.0), x(1.0), y(1.0));
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">confidence</text>"#, w / 2.0, h - 10.0);
    let _ = writeln!(s, r#"<text x="12" y="{}" font-size="12" transform="rotate(-90 12 {})" text-anchor="middle">positive fraction</text>"#, h / 2.0, h / 2.0);
    for (i, l) in report.labels.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let points: Vec<String> =
            l.curve.iter().map(|b| format!("{:.2},{:.2}", x(b.mean_confidence), y(b.positive_fraction))).collect();
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{colour}" points="{}"/>"#, points.join(" "));
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="11" fill="{colour}">{} (ECE {:.3})</text>"#,
            m + 6.0,
            m + 14.0 + 13.0 * i as f64,
            l.label,
            l.ece
        );
    }
    s.push_str("</svg>\n");
    s
}
