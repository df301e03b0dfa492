//! brat standoff (`.ann`) parsing shared by the BECauSE and CaTeRS adapters.
//!
//! Supported lines:
//!
//! ```text
//! T1\tArgument 0 9\tThe storm
//! T2\tConsequence 10 16\tcaused
//! T3\tArgument 17 23;28 33\tdamage flood
//! E1\tConsequence:T2 Cause:T1 Effect:T3
//! R1\tCAUSE_BEFORE Arg1:T1 Arg2:T3
//! ```
//!
//! Offsets are char offsets into the paired `.txt` file. Attribute, note and
//! comment lines (`A`, `N`, `#`, `*`) are ignored.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use crate::text::CharIndex;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TextBound {
    pub id: String,
    pub kind: String,
    pub fragments: Vec<(usize, usize)>,
    pub text: String,
}

/// An event (`E`) line: a typed trigger plus role arguments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventLine {
    pub id: String,
    pub kind: String,
    pub trigger: Option<String>,
    pub args: Vec<(String, String)>,
    pub line: usize,
}

/// A binary relation (`R`) line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationLine {
    pub id: String,
    pub kind: String,
    pub args: Vec<(String, String)>,
    pub line: usize,
}

#[derive(Debug, Clone, Default)]
pub struct Annotation {
    pub text_bounds: HashMap<String, TextBound>,
    pub events: Vec<EventLine>,
    pub relations: Vec<RelationLine>,
    /// T-lines that could not be parsed, keyed by id when one is readable.
    pub bad_text_bounds: HashMap<String, String>,
}

impl Annotation {
    pub fn parse(ann: &str) -> Self {
        let mut out = Annotation::default();
        for (i, raw) in ann.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            let mut cols = line.splitn(3, '\t');
            let id = cols.next().unwrap_or("").trim();
            let body = cols.next().unwrap_or("");
            match id.chars().next() {
                Some('T') => match parse_text_bound(id, body, cols.next()) {
                    Ok(tb) => {
                        out.text_bounds.insert(tb.id.clone(), tb);
                    }
                    Err(e) => {
                        out.bad_text_bounds.insert(id.to_string(), e);
                    }
                },
                Some('E') => {
                    let mut parts = body.split_whitespace();
                    let head = parts.next().unwrap_or("");
                    let (kind, trigger) = match head.split_once(':') {
                        Some((k, t)) => (k.to_string(), Some(t.to_string())),
                        None => (head.to_string(), None),
                    };
                    out.events.push(EventLine {
                        id: id.to_string(),
                        kind,
                        trigger,
                        args: role_args(parts),
                        line: i + 1,
                    });
                }
                Some('R') => {
                    let mut parts = body.split_whitespace();
                    let kind = parts.next().unwrap_or("").to_string();
                    out.relations.push(RelationLine {
                        id: id.to_string(),
                        kind,
                        args: role_args(parts),
                        line: i + 1,
                    });
                }
                _ => {}
            }
        }
        out
    }

    /// Looks up a text-bound annotation and checks it against the document.
    pub fn resolve(&self, id: &str, document: &CharIndex<'_>) -> Result<&TextBound, String> {
        if let Some(err) = self.bad_text_bounds.get(id) {
            return Err(format!("{id}: {err}"));
        }
        let tb = self
            .text_bounds
            .get(id)
            .ok_or_else(|| format!("dangling reference to {id}"))?;
        let mut pieces = Vec::with_capacity(tb.fragments.len());
        for &(s, e) in &tb.fragments {
            let piece = document
                .slice(s, e)
                .ok_or_else(|| format!("{id}: offsets {s}..{e} outside the text"))?;
            pieces.push(piece);
        }
        // brat joins discontinuous fragments with a single space
        if pieces.join(" ") != tb.text {
            return Err(format!("{id}: annotated text {:?} does not match the document", tb.text));
        }
        Ok(tb)
    }
}

fn role_args<'a>(parts: impl Iterator<Item = &'a str>) -> Vec<(String, String)> {
    parts
        .filter_map(|p| p.split_once(':'))
        .map(|(role, target)| (role.to_string(), target.to_string()))
        .collect()
}

fn parse_text_bound(id: &str, body: &str, text: Option<&str>) -> Result<TextBound, String> {
    let (kind, ranges) = body
        .split_once(' ')
        .ok_or_else(|| format!("T-line {id} has no offsets"))?;
    let mut fragments = Vec::new();
    for range in ranges.split(';') {
        let mut nums = range.split_whitespace().map(str::parse::<usize>);
        match (nums.next(), nums.next(), nums.next()) {
            (Some(Ok(s)), Some(Ok(e)), None) if s <= e => fragments.push((s, e)),
            _ => return Err(format!("T-line {id} has unreadable offsets {range:?}")),
        }
    }
    Ok(TextBound {
        id: id.to_string(),
        kind: kind.to_string(),
        fragments,
        text: text.unwrap_or("").to_string(),
    })
}

/// The `.txt` document paired with an `.ann` file.
pub fn paired_text(ann_path: &Path) -> PathBuf {
    ann_path.with_extension("txt")
}
