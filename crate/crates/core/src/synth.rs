//! Synthetic TimeML-like corpora drawn from a hidden timeline.
//!
//! Every entity gets a random integer interval; links are read off those
//! intervals, so generated documents are always consistent. Used by the
//! benchmarks and the end-to-end tests.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{AllenRelation, EntityId, PointRelation, Quad};
use crate::corpus::{Document, EntityKind, Span, TLink, TemporalEntity, TimeMLRelation};

#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub documents: usize,
    pub entities_per_doc: usize,
    pub links_per_doc: usize,
    /// Timestamps are drawn from `0..grid`; small grids produce many equalities.
    pub grid: u32,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig { documents: 6, entities_per_doc: 8, links_per_doc: 12, grid: 10, seed: 0 }
    }
}

/// A generated document together with its hidden entity intervals.
#[derive(Debug, Clone)]
pub struct SynthDocument {
    pub document: Document,
    pub intervals: Vec<(EntityId, u32, u32)>,
}

impl SynthDocument {
    /// Allen relation between two entities according to the hidden timeline.
    pub fn relation(&self, x: &EntityId, y: &EntityId) -> Option<AllenRelation> {
        let (_, xs, xe) = self.intervals.iter().find(|(id, ..)| id == x)?;
        let (_, ys, ye) = self.intervals.iter().find(|(id, ..)| id == y)?;
        AllenRelation::from_points(&Quad([
            PointRelation::between(xs, ys),
            PointRelation::between(xs, ye),
            PointRelation::between(xe, ys),
            PointRelation::between(xe, ye),
        ]))
    }
}

/// TimeML label for an Allen relation, varying among synonyms for `equals`.
fn timeml_label(r: AllenRelation, rng: &mut impl Rng) -> Option<TimeMLRelation> {
    Some(match r {
        AllenRelation::Before => TimeMLRelation::Before,
        AllenRelation::After => TimeMLRelation::After,
        AllenRelation::Meets => TimeMLRelation::Ibefore,
        AllenRelation::MetBy => TimeMLRelation::Iafter,
        AllenRelation::Starts => TimeMLRelation::Begins,
        AllenRelation::StartedBy => TimeMLRelation::BegunBy,
        AllenRelation::Finishes => TimeMLRelation::Ends,
        AllenRelation::FinishedBy => TimeMLRelation::EndedBy,
        AllenRelation::Contains => TimeMLRelation::Includes,
        AllenRelation::During => TimeMLRelation::IsIncluded,
        AllenRelation::Equals => match rng.gen_range(0..4) {
            0 => TimeMLRelation::Identity,
            1 => TimeMLRelation::During,
            _ => TimeMLRelation::Simultaneous,
        },
        AllenRelation::Overlaps | AllenRelation::OverlappedBy => return None,
    })
}

const FILLER: &[&str] = &["the", "officials", "said", "on", "and", "later", "that", "a", "report", "in"];

pub fn generate(config: &SynthConfig) -> Vec<SynthDocument> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    (0..config.documents)
        .map(|d| generate_document(&format!("synth{d:03}"), config, &mut rng))
        .collect()
}

pub fn generate_documents(config: &SynthConfig) -> Vec<Document> {
    generate(config).into_iter().map(|s| s.document).collect()
}

fn generate_document(doc_id: &str, config: &SynthConfig, rng: &mut ChaCha8Rng) -> SynthDocument {
    let grid = config.grid.max(2);
    let draw = |rng: &mut ChaCha8Rng| {
        let a = rng.gen_range(0..grid);
        let mut b = rng.gen_range(0..grid);
        while b == a {
            b = rng.gen_range(0..grid);
        }
        (a.min(b), a.max(b))
    };

    let dct = TemporalEntity {
        id: EntityId::new("t0"),
        kind: EntityKind::DocumentCreationTime,
        span: None,
        surface: None,
    };
    let (ds, de) = draw(rng);
    let mut intervals = vec![(dct.id.clone(), ds, de)];
    let mut entities = vec![dct.clone()];

    let mut text = String::new();
    for i in 1..=config.entities_per_doc {
        for _ in 0..rng.gen_range(1..4) {
            text.push_str(FILLER[rng.gen_range(0..FILLER.len())]);
            text.push(' ');
        }
        let is_event = rng.gen_bool(0.7);
        let (id, surface, kind) = if is_event {
            (format!("e{i}"), format!("happened{i}"), EntityKind::Event)
        } else {
            (format!("t{i}"), format!("day {i}"), EntityKind::Timex)
        };
        let start = text.len();
        text.push_str(&surface);
        let span = Span::new(start, text.len());
        text.push_str(if rng.gen_bool(0.3) { ". " } else { " " });
        let (s, e) = draw(rng);
        intervals.push((EntityId::new(id.clone()), s, e));
        entities.push(TemporalEntity { id: EntityId::new(id), kind, span: Some(span), surface: Some(surface) });
    }
    let text = text.trim_end().to_string();

    let mut doc = SynthDocument {
        document: Document { id: doc_id.to_string(), text, dct, entities, tlinks: Vec::new() },
        intervals,
    };

    let n = doc.document.entities.len();
    let mut used = BTreeSet::new();
    let mut attempts = 0;
    while doc.document.tlinks.len() < config.links_per_doc && attempts < config.links_per_doc * 20 {
        attempts += 1;
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i == j || used.contains(&(i.min(j), i.max(j))) {
            continue;
        }
        let x = doc.document.entities[i].id.clone();
        let y = doc.document.entities[j].id.clone();
        let Some(label) = doc.relation(&x, &y).and_then(|r| timeml_label(r, rng)) else { continue };
        used.insert((i.min(j), i.max(j)));
        doc.document.tlinks.push(TLink::new(x, label, y));
    }
    doc
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Serialises a document in TimeML 1.2.1 markup.
pub fn render_timeml(doc: &Document) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" ?>\n<TimeML>\n");
    let _ = writeln!(out, "<DOCID>{}</DOCID>", escape(&doc.id));
    let _ = writeln!(
        out,
        "<DCT><TIMEX3 tid=\"{}\" type=\"DATE\" value=\"2000-01-01\" temporalFunction=\"false\" functionInDocument=\"CREATION_TIME\">2000-01-01</TIMEX3></DCT>",
        doc.dct.id
    );
    let mut anchored: Vec<&TemporalEntity> = doc.entities.iter().filter(|e| e.span.is_some()).collect();
    anchored.sort_by_key(|e| e.span.map(|s| s.start));
    out.push_str("<TEXT>");
    let mut pos = 0;
    for e in &anchored {
        let span = e.span.expect("filtered");
        out.push_str(&escape(&doc.text[pos..span.start]));
        let body = escape(&doc.text[span.start..span.end]);
        match e.kind {
            EntityKind::Event => {
                let _ = write!(out, "<EVENT eid=\"{}\" class=\"OCCURRENCE\">{body}</EVENT>", e.id);
            }
            _ => {
                let _ = write!(out, "<TIMEX3 tid=\"{}\" type=\"DATE\" value=\"XXXX\">{body}</TIMEX3>", e.id);
            }
        }
        pos = span.end;
    }
    out.push_str(&escape(&doc.text[pos..]));
    out.push_str("</TEXT>\n");

    let instance = |id: &EntityId| format!("ei{}", id.as_str().trim_start_matches('e'));
    for e in doc.entities.iter().filter(|e| e.kind == EntityKind::Event) {
        let _ = writeln!(out, "<MAKEINSTANCE eventID=\"{}\" eiid=\"{}\" tense=\"PAST\" aspect=\"NONE\" polarity=\"POS\" pos=\"VERB\"/>", e.id, instance(&e.id));
    }
    for (i, link) in doc.tlinks.iter().enumerate() {
        let endpoint = |id: &EntityId, as_source: bool| {
            let is_event = doc.entity(id).is_some_and(|e| e.kind == EntityKind::Event);
            match (is_event, as_source) {
                (true, true) => format!("eventInstanceID=\"{}\"", instance(id)),
                (true, false) => format!("relatedToEventInstance=\"{}\"", instance(id)),
                (false, true) => format!("timeID=\"{id}\""),
                (false, false) => format!("relatedToTime=\"{id}\""),
            }
        };
        let _ = writeln!(
            out,
            "<TLINK lid=\"l{}\" relType=\"{}\" {} {}/>",
            i + 1,
            link.original_label,
            endpoint(&link.source, true),
            endpoint(&link.target, false)
        );
    }
    out.push_str("</TimeML>\n");
    out
}

/// Writes `train/*.tml` and `test/*.tml` under `root`.
pub fn write_layout(root: &Path, train: &[Document], test: &[Document]) -> std::io::Result<()> {
    for (dir, docs) in [("train", train), ("test", test)] {
        let dir = root.join(dir);
        std::fs::create_dir_all(&dir)?;
        for doc in docs {
            std::fs::write(dir.join(format!("{}.tml", doc.id)), render_timeml(doc))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::interval_closure;
    use crate::corpus::parse_tml;

    #[test]
    fn documents_are_consistent_and_round_trip() {
        let config = SynthConfig { documents: 5, seed: 3, ..SynthConfig::default() };
        for synth in generate(&config) {
            let doc = &synth.document;
            assert!(!doc.tlinks.is_empty());
            interval_closure(&doc.interval_links()).expect("consistent by construction");
            for link in &doc.tlinks {
                assert_eq!(synth.relation(&link.source, &link.target), Some(link.relation));
            }
            let parsed = parse_tml(render_timeml(doc).as_bytes()).unwrap();
            assert_eq!(&parsed, doc);
        }
    }

    #[test]
    fn generation_is_seeded() {
        let a = generate_documents(&SynthConfig { seed: 11, ..SynthConfig::default() });
        let b = generate_documents(&SynthConfig { seed: 11, ..SynthConfig::default() });
        assert_eq!(a, b);
    }
}
