//! Causal-TimeBank in TimeML inline form.
//!
//! ```xml
//! <TimeML>
//!   <DOCID>wsj_0006</DOCID>
//!   <TEXT>Sales <EVENT eid="e1">fell</EVENT> <C-SIGNAL cid="c1">because of</C-SIGNAL>
//!   the <EVENT eid="e2">strike</EVENT>.</TEXT>
//!   <MAKEINSTANCE eventID="e1" eiid="ei1"/>
//!   <MAKEINSTANCE eventID="e2" eiid="ei2"/>
//!   <CLINK lid="l1" eventInstanceID="ei2" relatedToEventInstance="ei1" c-signalID="c1"/>
//! </TimeML>
//! ```
//!
//! A `CLINK` runs from the causing event (`eventInstanceID`) to the caused
//! one (`relatedToEventInstance`), so the source is `span1` with direction 0.
//! `c-signalID` may name a `C-SIGNAL` (`cid`) or `SIGNAL` (`sid`) element.
//! The context is the sentence window around both events and the signal.

use std::collections::HashMap;
use std::path::Path;

use roxmltree::Node;

use super::{file_stem, read_source, source_error, Draft, ParseOutput, SkipReason};
use crate::error::Result;
use crate::model::{DIRECTION_FORWARD, LABEL_CAUSAL};
use crate::text::NormalizationPolicy;

pub(crate) fn parse_file(path: &Path, policy: NormalizationPolicy) -> Result<ParseOutput> {
    let text = read_source(path)?;
    parse_str(&text, &file_stem(path), policy).map_err(|m| source_error(path, m))
}

#[derive(Default)]
struct Flattened {
    text: String,
    len: usize,
    events: HashMap<String, (usize, usize)>,
    signals: HashMap<String, (usize, usize)>,
}

fn flatten(node: Node<'_, '_>, out: &mut Flattened) {
    for child in node.children() {
        if child.is_text() {
            let t = child.text().unwrap_or("");
            out.text.push_str(t);
            out.len += t.chars().count();
            continue;
        }
        if !child.is_element() {
            continue;
        }
        let start = out.len;
        flatten(child, out);
        let range = (start, out.len);
        match child.tag_name().name() {
            "EVENT" => {
                if let Some(id) = child.attribute("eid") {
                    out.events.insert(id.to_string(), range);
                }
            }
            "SIGNAL" | "C-SIGNAL" => {
                if let Some(id) = child.attribute("cid").or_else(|| child.attribute("sid")) {
                    out.signals.insert(id.to_string(), range);
                }
            }
            _ => {}
        }
    }
}

pub fn parse_str(text: &str, doc: &str, policy: NormalizationPolicy) -> std::result::Result<ParseOutput, String> {
    let mut out = ParseOutput::default();
    if text.trim().is_empty() {
        return Ok(out);
    }
    let xml = roxmltree::Document::parse(text).map_err(|e| e.to_string())?;
    let root = xml.root_element();
    let doc_id = root
        .descendants()
        .find(|n| n.has_tag_name("DOCID"))
        .and_then(|n| n.text())
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .unwrap_or_else(|| doc.to_string());

    let mut flat = Flattened::default();
    if let Some(body) = root.descendants().find(|n| n.has_tag_name("TEXT")) {
        flatten(body, &mut flat);
    }
    let instances: HashMap<&str, &str> = root
        .descendants()
        .filter(|n| n.has_tag_name("MAKEINSTANCE"))
        .filter_map(|n| Some((n.attribute("eiid")?, n.attribute("eventID")?)))
        .collect();
    let event_range = |id: Option<&str>| -> std::result::Result<(usize, usize), String> {
        let id = id.ok_or("CLINK endpoint missing")?;
        let eid = instances.get(id).copied().unwrap_or(id);
        flat.events
            .get(eid)
            .copied()
            .ok_or_else(|| format!("dangling event reference {id}"))
    };

    for clink in root.descendants().filter(|n| n.has_tag_name("CLINK")) {
        out.candidates += 1;
        let original_id = format!("{doc_id}:{}", clink.attribute("lid").unwrap_or("?"));
        let source = event_range(clink.attribute("eventInstanceID").or_else(|| clink.attribute("eventID")));
        let target = event_range(
            clink
                .attribute("relatedToEventInstance")
                .or_else(|| clink.attribute("relatedToEvent")),
        );
        let signal = match clink.attribute("c-signalID").filter(|s| !s.is_empty()) {
            Some(sid) => flat
                .signals
                .get(sid)
                .map(|r| vec![*r])
                .ok_or_else(|| format!("dangling signal reference {sid}")),
            None => Ok(Vec::new()),
        };
        let (source, target, signal) = match (source, target, signal) {
            (Ok(s), Ok(t), Ok(sig)) => (s, t, sig),
            (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => {
                out.skip(original_id, SkipReason::Malformed, e);
                continue;
            }
        };
        match Draft::from_document(
            original_id.clone(),
            &flat.text,
            vec![source],
            vec![target],
            signal,
            LABEL_CAUSAL,
            DIRECTION_FORWARD,
        ) {
            Some(draft) => out.push_draft(draft, super::CAUSAL_TIMEBANK, policy),
            None => out.skip(original_id, SkipReason::Malformed, "could not cut a context window"),
        }
    }
    Ok(out)
}
