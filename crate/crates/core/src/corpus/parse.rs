use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use log::{debug, warn};
use roxmltree::{Node, ParsingOptions};

use super::model::{Document, EntityKind, Span, TLink, TemporalEntity, TimeMLRelation};
use crate::algebra::EntityId;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Position {
    pub line: u32,
    pub column: u32,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("malformed XML: {0}")]
    Xml(String),
    #[error("document has no creation time annotation")]
    MissingDct,
    #[error("document has no DOCID and no fallback id was given")]
    MissingDocId,
    #[error("<{element}> at {position} lacks attribute `{attribute}`")]
    MissingAttribute {
        element: String,
        attribute: &'static str,
        position: Position,
    },
    #[error("duplicate entity id `{id}` at {position}")]
    DuplicateEntity { id: String, position: Position },
    #[error("TLINK {link} at {position} references unknown id `{reference}`")]
    DanglingReference {
        link: String,
        reference: String,
        position: Position,
    },
    #[error("TLINK {link} at {position} has unknown relType `{label}`")]
    UnknownRelation {
        link: String,
        label: String,
        position: Position,
    },
}

fn position(node: &Node) -> Position {
    let pos = node.document().text_pos_at(node.range().start);
    Position { line: pos.row, column: pos.col }
}

fn required<'a>(node: &Node<'a, '_>, attribute: &'static str) -> Result<&'a str, ParseError> {
    node.attribute(attribute).ok_or_else(|| ParseError::MissingAttribute {
        element: node.tag_name().name().to_string(),
        attribute,
        position: position(node),
    })
}

fn entity_id_attr(node: &Node) -> Option<&'static str> {
    match node.tag_name().name() {
        "EVENT" => Some("eid"),
        "TIMEX3" => Some("tid"),
        _ => None,
    }
}

fn is_dct_timex(node: &Node) -> bool {
    node.has_tag_name("TIMEX3")
        && (node.attribute("functionInDocument") == Some("CREATION_TIME")
            || node.parent_element().is_some_and(|p| p.has_tag_name("DCT")))
}

/// Parses a TimeML document; the id comes from `<DOCID>`.
pub fn parse_tml(content: &[u8]) -> Result<Document, ParseError> {
    parse_tml_with_id(content, None)
}

/// Like [`parse_tml`], falling back to `default_id` when `<DOCID>` is absent.
pub fn parse_tml_with_id(content: &[u8], default_id: Option<&str>) -> Result<Document, ParseError> {
    let source = std::str::from_utf8(content).map_err(|e| ParseError::Xml(e.to_string()))?;
    let options = ParsingOptions { allow_dtd: true, ..ParsingOptions::default() };
    let xml = roxmltree::Document::parse_with_options(source, options).map_err(|e| ParseError::Xml(e.to_string()))?;
    let root = xml.root_element();

    let doc_id = root
        .descendants()
        .find(|n| n.has_tag_name("DOCID"))
        .and_then(|n| n.text())
        .map(|t| t.trim().to_string())
        .filter(|t| !t.is_empty())
        .or_else(|| default_id.map(str::to_string))
        .ok_or(ParseError::MissingDocId)?;

    let dct_node = root.descendants().find(is_dct_timex).ok_or(ParseError::MissingDct)?;
    let dct = TemporalEntity {
        id: EntityId::new(required(&dct_node, "tid")?),
        kind: EntityKind::DocumentCreationTime,
        span: None,
        surface: None,
    };

    // Body text with markup stripped, recording entity spans on the way.
    let mut text = String::new();
    let mut spans: HashMap<NodeKey, Span> = HashMap::new();
    if let Some(body) = root.descendants().find(|n| n.has_tag_name("TEXT")) {
        collect_text(body, &mut text, &mut spans);
    }

    let mut entities = vec![dct.clone()];
    let mut seen: HashSet<String> = HashSet::from([dct.id.as_str().to_string()]);
    for node in root.descendants().filter(|n| n.is_element()) {
        let Some(attr) = entity_id_attr(&node) else { continue };
        if node.id() == dct_node.id() {
            continue;
        }
        let id = required(&node, attr)?;
        if !seen.insert(id.to_string()) {
            return Err(ParseError::DuplicateEntity { id: id.to_string(), position: position(&node) });
        }
        let kind = if node.has_tag_name("EVENT") { EntityKind::Event } else { EntityKind::Timex };
        let span = spans.get(&NodeKey(node.id())).copied().filter(|s| !s.is_empty());
        let surface = match span {
            Some(s) => Some(text[s.start..s.end].to_string()),
            None => Some(node_text(&node)),
        };
        entities.push(TemporalEntity { id: EntityId::new(id), kind, span, surface });
    }

    // Event instances resolve to their event.
    let mut instances: HashMap<&str, &str> = HashMap::new();
    for node in root.descendants().filter(|n| n.has_tag_name("MAKEINSTANCE")) {
        instances.insert(required(&node, "eiid")?, required(&node, "eventID")?);
    }
    let resolve = |reference: &str| -> Option<EntityId> {
        if let Some(eid) = instances.get(reference) {
            seen.contains(*eid).then(|| EntityId::new(*eid))
        } else {
            seen.contains(reference).then(|| EntityId::new(reference))
        }
    };

    let mut tlinks = Vec::new();
    let mut pairs = BTreeSet::new();
    for node in root.descendants().filter(|n| n.has_tag_name("TLINK")) {
        let link = node.attribute("lid").unwrap_or("?").to_string();
        let source_ref = node
            .attribute("eventInstanceID")
            .or_else(|| node.attribute("timeID"))
            .or_else(|| node.attribute("eventID"))
            .ok_or_else(|| ParseError::MissingAttribute {
                element: "TLINK".into(),
                attribute: "eventInstanceID|timeID",
                position: position(&node),
            })?;
        let target_ref = node
            .attribute("relatedToEventInstance")
            .or_else(|| node.attribute("relatedToTime"))
            .or_else(|| node.attribute("relatedToEvent"))
            .ok_or_else(|| ParseError::MissingAttribute {
                element: "TLINK".into(),
                attribute: "relatedToEventInstance|relatedToTime",
                position: position(&node),
            })?;
        let label_str = required(&node, "relType")?;
        let label: TimeMLRelation = label_str.parse().map_err(|_| ParseError::UnknownRelation {
            link: link.clone(),
            label: label_str.to_string(),
            position: position(&node),
        })?;
        let dangling = |reference: &str| ParseError::DanglingReference {
            link: link.clone(),
            reference: reference.to_string(),
            position: position(&node),
        };
        let source = resolve(source_ref).ok_or_else(|| dangling(source_ref))?;
        let target = resolve(target_ref).ok_or_else(|| dangling(target_ref))?;
        if source == target {
            debug!("{doc_id}: dropping self-link {link} on {source}");
            continue;
        }
        if !pairs.insert((source.clone(), target.clone())) {
            warn!("{doc_id}: duplicate TLINK {link} for ({source}, {target}); keeping the first");
            continue;
        }
        tlinks.push(TLink::new(source, label, target));
    }

    Ok(Document { id: doc_id, text, dct, entities, tlinks })
}

#[derive(PartialEq, Eq, Hash)]
struct NodeKey(roxmltree::NodeId);

fn collect_text(node: Node, text: &mut String, spans: &mut HashMap<NodeKey, Span>) {
    for child in node.children() {
        if child.is_text() {
            text.push_str(child.text().unwrap_or_default());
        } else if child.is_element() {
            let start = text.len();
            collect_text(child, text, spans);
            if entity_id_attr(&child).is_some() {
                spans.insert(NodeKey(child.id()), Span::new(start, text.len()));
            }
        }
    }
}

fn node_text(node: &Node) -> String {
    node.descendants().filter(|n| n.is_text()).filter_map(|n| n.text()).collect()
}
