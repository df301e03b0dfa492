//! EventStoryLine v1.5 CAT XML.
//!
//! ```xml
//! <Document doc_name="1_1ecbplus.xml">
//!   <token t_id="1" sentence="0" number="0">A</token>
//!   ...
//!   <Markables>
//!     <ACTION_OCCURRENCE m_id="30"><token_anchor t_id="4"/></ACTION_OCCURRENCE>
//!   </Markables>
//!   <Relations>
//!     <PLOT_LINK r_id="1" relType="PRECONDITION" signal="41">
//!       <source m_id="30"/><target m_id="31"/>
//!     </PLOT_LINK>
//!   </Relations>
//! </Document>
//! ```
//!
//! One relation per `PLOT_LINK` with `relType` PRECONDITION (source causes
//! target, direction 0) or FALLING_ACTION (source is a consequence of
//! target, direction 1); `span1` is always the source mention. Any other
//! link type is excluded. The optional `signal` attribute names a markable
//! whose tokens become the signal. The context is the detokenized text of
//! every sentence from the first to the last one touched by the link.

use std::collections::HashMap;
use std::path::Path;

use super::{file_stem, read_source, source_error, Draft, ParseOutput, SkipReason};
use crate::error::Result;
use crate::model::{DIRECTION_BACKWARD, DIRECTION_FORWARD, LABEL_CAUSAL};
use crate::text::NormalizationPolicy;

pub(crate) fn parse_file(path: &Path, policy: NormalizationPolicy) -> Result<ParseOutput> {
    let text = read_source(path)?;
    parse_str(&text, &file_stem(path), policy).map_err(|m| source_error(path, m))
}

#[derive(Debug, Clone)]
struct Token {
    sentence: i64,
    text: String,
}

fn no_space_before(token: &str) -> bool {
    matches!(token, "." | "," | ";" | ":" | "!" | "?" | ")" | "]" | "}" | "%" | "'s" | "n't" | "'")
}

fn no_space_after(token: &str) -> bool {
    matches!(token, "(" | "[" | "{" | "$")
}

/// Detokenizes the given tokens (in document order) into one string and
/// returns the char range of every token.
fn detokenize(tokens: &[(&str, &Token)]) -> (String, HashMap<String, (usize, usize)>) {
    let mut text = String::new();
    let mut len = 0usize;
    let mut ranges = HashMap::new();
    let mut prev: Option<&str> = None;
    for (id, tok) in tokens {
        if let Some(p) = prev {
            if !no_space_before(&tok.text) && !no_space_after(p) {
                text.push(' ');
                len += 1;
            }
        }
        let n = tok.text.chars().count();
        ranges.insert(id.to_string(), (len, len + n));
        text.push_str(&tok.text);
        len += n;
        prev = Some(&tok.text);
    }
    (text, ranges)
}

pub fn parse_str(text: &str, doc: &str, policy: NormalizationPolicy) -> std::result::Result<ParseOutput, String> {
    let mut out = ParseOutput::default();
    if text.trim().is_empty() {
        return Ok(out);
    }
    let xml = roxmltree::Document::parse(text).map_err(|e| e.to_string())?;
    let root = xml.root_element();
    let doc_name = root
        .attribute("doc_name")
        .map(|d| d.trim_end_matches(".xml").to_string())
        .unwrap_or_else(|| doc.to_string());

    // token id -> token, kept in document order
    let mut order: Vec<String> = Vec::new();
    let mut tokens: HashMap<String, Token> = HashMap::new();
    for node in root.children().filter(|n| n.has_tag_name("token")) {
        let Some(id) = node.attribute("t_id") else { continue };
        let sentence = node
            .attribute("sentence")
            .and_then(|s| s.parse().ok())
            .unwrap_or(0);
        order.push(id.to_string());
        tokens.insert(
            id.to_string(),
            Token {
                sentence,
                text: node.text().unwrap_or("").trim().to_string(),
            },
        );
    }
    let position: HashMap<&str, usize> = order.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();

    // markable id -> token ids
    let mut markables: HashMap<String, Vec<String>> = HashMap::new();
    if let Some(section) = root.children().find(|n| n.has_tag_name("Markables")) {
        for m in section.children().filter(|n| n.is_element()) {
            let Some(mid) = m.attribute("m_id") else { continue };
            let anchors = m
                .children()
                .filter(|n| n.has_tag_name("token_anchor"))
                .filter_map(|n| n.attribute("t_id").map(str::to_string))
                .collect();
            markables.insert(mid.to_string(), anchors);
        }
    }

    let links = root
        .children()
        .filter(|n| n.has_tag_name("Relations"))
        .flat_map(|r| r.children())
        .filter(|n| n.has_tag_name("PLOT_LINK"));

    for link in links {
        out.candidates += 1;
        let original_id = format!("{doc_name}:{}", link.attribute("r_id").unwrap_or("?"));
        let direction = match link.attribute("relType") {
            Some("PRECONDITION") => DIRECTION_FORWARD,
            Some("FALLING_ACTION") => DIRECTION_BACKWARD,
            other => {
                out.skip(
                    original_id,
                    SkipReason::ExcludedRelationType,
                    format!("relType {}", other.unwrap_or("<none>")),
                );
                continue;
            }
        };
        let endpoint = |tag: &str| {
            link.children()
                .find(|n| n.has_tag_name(tag))
                .and_then(|n| n.attribute("m_id"))
        };
        let mention = |mid: Option<&str>| -> std::result::Result<Vec<&str>, String> {
            let mid = mid.ok_or("missing mention reference")?;
            let anchors = markables
                .get(mid)
                .ok_or_else(|| format!("dangling mention {mid}"))?;
            if anchors.is_empty() {
                return Err(format!("mention {mid} has no tokens"));
            }
            let mut ids: Vec<&str> = Vec::with_capacity(anchors.len());
            for t in anchors {
                if !tokens.contains_key(t) {
                    return Err(format!("mention {mid} anchors missing token {t}"));
                }
                ids.push(t.as_str());
            }
            ids.sort_by_key(|t| position[t]);
            Ok(ids)
        };
        let resolved = mention(endpoint("source")).and_then(|s| {
            let t = mention(endpoint("target"))?;
            let sig = match link.attribute("signal").filter(|s| !s.is_empty()) {
                Some(mid) => mention(Some(mid))?,
                None => Vec::new(),
            };
            Ok((s, t, sig))
        });
        let (source, target, signal) = match resolved {
            Ok(r) => r,
            Err(msg) => {
                out.skip(original_id, SkipReason::Malformed, msg);
                continue;
            }
        };

        let sentences: Vec<i64> = source
            .iter()
            .chain(&target)
            .chain(&signal)
            .map(|t| tokens[*t].sentence)
            .collect();
        let (lo, hi) = (
            *sentences.iter().min().expect("non-empty"),
            *sentences.iter().max().expect("non-empty"),
        );
        let window: Vec<(&str, &Token)> = order
            .iter()
            .map(|id| (id.as_str(), &tokens[id]))
            .filter(|(_, t)| (lo..=hi).contains(&t.sentence))
            .collect();
        let (raw_context, ranges) = detokenize(&window);
        let frags = |ids: &[&str]| -> Vec<(usize, usize)> {
            let mut v: Vec<(usize, usize)> = ids.iter().map(|t| ranges[*t]).collect();
            v.sort();
            v
        };
        out.push_draft(
            Draft {
                original_id,
                span1: frags(&source),
                span2: frags(&target),
                signal: frags(&signal),
                raw_context,
                label: LABEL_CAUSAL,
                direction,
            },
            super::EVENT_STORY_LINE,
            policy,
        );
    }
    Ok(out)
}
