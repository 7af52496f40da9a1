//! Tagged model inputs: the document creation time preamble, entity boundary
//! tags and endpoint markers.
//!
//! A point query wraps the x entity in `<xs>`/`<xe>` tags and the y entity in
//! `<ys>`/`<ye>` tags, the side letter naming the queried endpoint. Interval
//! queries use the untyped `<x>` and `<y>`. Every tag is inserted with one
//! separating space, so removing the tag strings restores the text exactly.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::algebra::{EndpointPairKey, EntityId, PointEndpoint, Side};
use crate::corpus::{Document, EntityKind, Span};
use crate::dataset::{read_jsonl, write_jsonl, DatasetError};

pub const PREAMBLE: &str = "Document creation time: ";
pub const DCT_ANCHOR: &str = "<dct>";

/// Every tag that can appear in a query.
pub const TAGS: [&str; 12] = [
    "<xs>", "</xs>", "<xe>", "</xe>", "<ys>", "</ys>", "<ye>", "</ye>", "<x>", "</x>", "<y>", "</y>",
];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EncodingError {
    #[error("{doc}: entity {entity} is not in the document")]
    UnknownEntity { doc: String, entity: EntityId },
    #[error("{doc}: cannot relate {entity} to itself")]
    SameEntity { doc: String, entity: EntityId },
    #[error("{doc}: entity {entity} has no position in the text")]
    Unanchored { doc: String, entity: EntityId },
    #[error("{doc}: spans of {x} and {y} cross")]
    OverlappingSpans { doc: String, x: EntityId, y: EntityId },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Swapped,
}

/// What a query asks about, as tagged: `x` carries the x tags.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum QuerySubject {
    Points { x: PointEndpoint, y: PointEndpoint },
    Entities { x: EntityId, y: EntityId },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaggedQuery {
    /// Derived from the document and the tagged endpoints only, so identical
    /// texts share an id.
    pub id: String,
    pub doc_id: String,
    pub text: String,
    pub direction: Direction,
    pub subject: QuerySubject,
    /// Byte offset in `text` where the document body begins.
    body_start: usize,
}

/// The preamble followed by the document text.
pub fn preambled_text(doc: &Document) -> String {
    format!("{PREAMBLE}{DCT_ANCHOR} {}", doc.text)
}

fn body_offset() -> usize {
    PREAMBLE.len() + DCT_ANCHOR.len() + 1
}

/// Removes every tag together with its separating space.
pub fn strip_tags(text: &str) -> String {
    let mut out = text.to_string();
    for tag in TAGS {
        if tag.starts_with("</") {
            out = out.replace(&format!(" {tag}"), "");
        } else {
            out = out.replace(&format!("{tag} "), "");
        }
    }
    out
}

pub fn point_query_id(doc_id: &str, x: &PointEndpoint, y: &PointEndpoint) -> String {
    format!("{doc_id}::{}_{}::{}_{}", x.entity, x.side, y.entity, y.side)
}

pub fn interval_query_id(doc_id: &str, x: &EntityId, y: &EntityId) -> String {
    format!("{doc_id}::{x}::{y}")
}

/// Location of an entity in the preambled text.
fn locate(doc: &Document, id: &EntityId) -> Result<Span, EncodingError> {
    let entity = doc
        .entity(id)
        .ok_or_else(|| EncodingError::UnknownEntity { doc: doc.id.clone(), entity: id.clone() })?;
    if entity.kind == EntityKind::DocumentCreationTime || *id == doc.dct.id {
        return Ok(Span::new(PREAMBLE.len(), PREAMBLE.len() + DCT_ANCHOR.len()));
    }
    let span = entity
        .span
        .ok_or_else(|| EncodingError::Unanchored { doc: doc.id.clone(), entity: id.clone() })?;
    Ok(Span::new(span.start + body_offset(), span.end + body_offset()))
}

fn insert_tags(
    doc: &Document,
    (x, x_tag): (&EntityId, &str),
    (y, y_tag): (&EntityId, &str),
) -> Result<(String, usize), EncodingError> {
    if x == y {
        return Err(EncodingError::SameEntity { doc: doc.id.clone(), entity: x.clone() });
    }
    let xs = locate(doc, x)?;
    let ys = locate(doc, y)?;
    if xs.overlaps(&ys) && !xs.contains(&ys) && !ys.contains(&xs) {
        return Err(EncodingError::OverlappingSpans { doc: doc.id.clone(), x: x.clone(), y: y.clone() });
    }

    // (position, closes-first, nesting rank, string)
    let mut inserts: Vec<(usize, u8, isize, String)> = Vec::with_capacity(4);
    for (span, tag) in [(xs, x_tag), (ys, y_tag)] {
        let len = span.len() as isize;
        inserts.push((span.start, 1, -len, format!("<{tag}> ")));
        inserts.push((span.end, 0, len, format!(" </{tag}>")));
    }
    inserts.sort();

    let base = preambled_text(doc);
    let mut out = String::with_capacity(base.len() + 24);
    let mut body_start = body_offset();
    let mut pos = 0;
    for (at, _, _, s) in inserts {
        out.push_str(&base[pos..at]);
        if at < body_offset() {
            body_start += s.len();
        }
        out.push_str(&s);
        pos = at;
    }
    out.push_str(&base[pos..]);
    Ok((out, body_start))
}

fn tag_name(letter: char, side: Side) -> String {
    format!("{letter}{}", side.letter())
}

/// Tags the pair `(x, y)`. `Swapped` puts the x tags on `y`'s entity and
/// the y tags on `x`'s, so the query reads `y REL x`.
pub fn tag_point_pair(
    doc: &Document,
    x: &PointEndpoint,
    y: &PointEndpoint,
    direction: Direction,
) -> Result<TaggedQuery, EncodingError> {
    let (tx, ty) = match direction {
        Direction::Forward => (x, y),
        Direction::Swapped => (y, x),
    };
    let (text, body_start) = insert_tags(
        doc,
        (&tx.entity, &tag_name('x', tx.side)),
        (&ty.entity, &tag_name('y', ty.side)),
    )?;
    Ok(TaggedQuery {
        id: point_query_id(&doc.id, tx, ty),
        doc_id: doc.id.clone(),
        text,
        direction,
        subject: QuerySubject::Points { x: tx.clone(), y: ty.clone() },
        body_start,
    })
}

pub fn tag_interval_pair(doc: &Document, x: &EntityId, y: &EntityId) -> Result<TaggedQuery, EncodingError> {
    let (text, body_start) = insert_tags(doc, (x, "x"), (y, "y"))?;
    Ok(TaggedQuery {
        id: interval_query_id(&doc.id, x, y),
        doc_id: doc.id.clone(),
        text,
        direction: Direction::Forward,
        subject: QuerySubject::Entities { x: x.clone(), y: y.clone() },
        body_start,
    })
}

/// Forward and swapped queries for each endpoint pair of `(x, y)`, in key order.
pub fn pair_queries(
    doc: &Document,
    x: &EntityId,
    y: &EntityId,
) -> Result<Vec<(EndpointPairKey, TaggedQuery, TaggedQuery)>, EncodingError> {
    EndpointPairKey::ALL
        .into_iter()
        .map(|key| {
            let xi = PointEndpoint::new(x.clone(), key.x_side());
            let yj = PointEndpoint::new(y.clone(), key.y_side());
            Ok((
                key,
                tag_point_pair(doc, &xi, &yj, Direction::Forward)?,
                tag_point_pair(doc, &xi, &yj, Direction::Swapped)?,
            ))
        })
        .collect()
}

impl TaggedQuery {
    /// The text cut to at most `max_chars` characters (or as few as keep every
    /// tag): the preamble is kept whole and the body window is centred on the
    /// tagged spans.
    pub fn truncated(&self, max_chars: usize) -> String {
        let total = self.text.chars().count();
        if total <= max_chars {
            return self.text.clone();
        }
        let (head, body) = self.text.split_at(self.body_start);
        let budget = max_chars.saturating_sub(head.chars().count());

        let chars: Vec<(usize, char)> = body.char_indices().collect();
        let byte_to_char = |b: usize| chars.partition_point(|&(i, _)| i < b);
        let mut lo = usize::MAX;
        let mut hi = 0;
        for tag in TAGS {
            for (at, m) in body.match_indices(tag) {
                lo = lo.min(byte_to_char(at));
                hi = hi.max(byte_to_char(at + m.len()));
            }
        }
        if lo > hi {
            lo = 0;
            hi = 0;
        }
        let n = chars.len();
        let (start, end) = if hi - lo >= budget {
            (lo, hi)
        } else {
            let spare = budget - (hi - lo);
            let start = lo.saturating_sub(spare / 2).min(n.saturating_sub(budget));
            (start, (start + budget).min(n))
        };
        let byte = |c: usize| chars.get(c).map_or(body.len(), |&(i, _)| i);
        format!("{head}{}", &body[byte(start)..byte(end)])
    }
}

/// One line of a tagged-query file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryRecord {
    pub query_id: String,
    pub direction: Direction,
    pub text: String,
}

impl From<&TaggedQuery> for QueryRecord {
    fn from(q: &TaggedQuery) -> Self {
        QueryRecord { query_id: q.id.clone(), direction: q.direction, text: q.text.clone() }
    }
}

/// Writes queries, keeping the first of any repeated id.
pub fn write_queries<'a>(path: &Path, queries: impl IntoIterator<Item = &'a TaggedQuery>) -> Result<usize, DatasetError> {
    let mut seen = HashSet::new();
    let records: Vec<QueryRecord> =
        queries.into_iter().filter(|q| seen.insert(q.id.clone())).map(QueryRecord::from).collect();
    let n = records.len();
    write_jsonl(path, records)?;
    Ok(n)
}

pub fn read_queries(path: &Path) -> Result<Vec<QueryRecord>, DatasetError> {
    read_jsonl(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{TemporalEntity, TimeMLRelation, TLink};

    fn fig2() -> Document {
        let text = "John arrived in Boston after 10 p.m.".to_string();
        let dct = TemporalEntity { id: "t0".into(), kind: EntityKind::DocumentCreationTime, span: None, surface: None };
        let ent = |id: &str, kind, s: &str| {
            let start = text.find(s).unwrap();
            TemporalEntity { id: id.into(), kind, span: Some(Span::new(start, start + s.len())), surface: Some(s.into()) }
        };
        Document {
            id: "d".into(),
            entities: vec![dct.clone(), ent("e1", EntityKind::Event, "arrived"), ent("t1", EntityKind::Timex, "10 p.m.")],
            tlinks: vec![TLink::new("e1", TimeMLRelation::After, "t1")],
            dct,
            text,
        }
    }

    fn p(e: &str, side: Side) -> PointEndpoint {
        PointEndpoint::new(e, side)
    }

    #[test]
    fn forward_point_query() {
        let q = tag_point_pair(&fig2(), &p("e1", Side::Start), &p("t1", Side::End), Direction::Forward).unwrap();
        assert_eq!(q.text, "Document creation time: <dct> John <xs> arrived </xs> in Boston after <ye> 10 p.m. </ye>");
        assert_eq!(q.id, "d::e1_s::t1_e");
    }

    #[test]
    fn swapped_point_query() {
        let q = tag_point_pair(&fig2(), &p("e1", Side::Start), &p("t1", Side::End), Direction::Swapped).unwrap();
        assert_eq!(q.text, "Document creation time: <dct> John <ys> arrived </ys> in Boston after <xe> 10 p.m. </xe>");
        assert_eq!(q.subject, QuerySubject::Points { x: p("t1", Side::End), y: p("e1", Side::Start) });
    }

    #[test]
    fn dct_is_tagged_in_preamble() {
        let q = tag_point_pair(&fig2(), &p("t0", Side::Start), &p("e1", Side::End), Direction::Forward).unwrap();
        assert_eq!(q.text, "Document creation time: <xs> <dct> </xs> John <ye> arrived </ye> in Boston after 10 p.m.");
        assert_eq!(strip_tags(&q.text), preambled_text(&fig2()));
    }

    #[test]
    fn interval_query() {
        let doc = fig2();
        let q = tag_interval_pair(&doc, &"e1".into(), &"t1".into()).unwrap();
        assert_eq!(q.text, "Document creation time: <dct> John <x> arrived </x> in Boston after <y> 10 p.m. </y>");
        assert_eq!(strip_tags(&q.text), preambled_text(&doc));
        assert!(matches!(
            tag_interval_pair(&doc, &"e1".into(), &"e1".into()),
            Err(EncodingError::SameEntity { .. })
        ));
        assert!(matches!(
            tag_interval_pair(&doc, &"e1".into(), &"e9".into()),
            Err(EncodingError::UnknownEntity { .. })
        ));
    }

    #[test]
    fn nesting_and_crossing() {
        let mut doc = fig2();
        doc.entities.push(TemporalEntity { id: "t2".into(), kind: EntityKind::Timex, span: Some(Span::new(29, 31)), surface: None });
        doc.entities.push(TemporalEntity { id: "t3".into(), kind: EntityKind::Timex, span: Some(Span::new(23, 31)), surface: None });
        let q = tag_interval_pair(&doc, &"t1".into(), &"t2".into()).unwrap();
        assert_eq!(q.text, "Document creation time: <dct> John arrived in Boston after <x> <y> 10 </y> p.m. </x>");
        assert_eq!(strip_tags(&q.text), preambled_text(&doc));
        assert!(matches!(
            tag_interval_pair(&doc, &"t1".into(), &"t3".into()),
            Err(EncodingError::OverlappingSpans { .. })
        ));
    }

    #[test]
    fn eight_queries_per_pair() {
        let doc = fig2();
        let qs = pair_queries(&doc, &"e1".into(), &"t1".into()).unwrap();
        assert_eq!(qs.len(), 4);
        for (key, fwd, swp) in &qs {
            assert_eq!(fwd.id, point_query_id("d", &p("e1", key.x_side()), &p("t1", key.y_side())));
            assert_eq!(swp.id, point_query_id("d", &p("t1", key.y_side()), &p("e1", key.x_side())));
            assert_eq!(strip_tags(&fwd.text), strip_tags(&swp.text));
        }
    }

    #[test]
    fn truncation_keeps_preamble_and_tags() {
        let mut doc = fig2();
        let filler = "word ".repeat(200);
        let shift = filler.len();
        doc.text = format!("{filler}{}{filler}", doc.text);
        for e in doc.entities.iter_mut() {
            if let Some(s) = e.span.as_mut() {
                *s = Span::new(s.start + shift, s.end + shift);
            }
        }
        let q = tag_point_pair(&doc, &p("e1", Side::Start), &p("t1", Side::End), Direction::Forward).unwrap();
        let cut = q.truncated(120);
        assert_eq!(cut.chars().count(), 120);
        assert!(cut.starts_with("Document creation time: <dct> "));
        for tag in ["<xs>", "</xs>", "<ye>", "</ye>"] {
            assert!(cut.contains(tag), "{cut}");
        }
        assert_eq!(q.truncated(10_000), q.text);
    }
}
