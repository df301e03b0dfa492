//! EventCausality standoff relations.
//!
//! A `.rel` file pairs with a `.txt` news article. One relation per line,
//! tab separated: id, type, cause mention range, effect mention range, with
//! ranges as `start:end` char offsets into the article:
//!
//! ```text
//! r1\tC\t120:127\t145:152
//! r2\tR\t300:305\t330:341
//! ```
//!
//! `C` (causality) lines become causal relations with the cause as `span1`.
//! `R` (relatedness) lines are excluded. Lines starting with `#` are comments.

use std::path::Path;

use super::{file_stem, read_source, Draft, ParseOutput, SkipReason};
use crate::error::Result;
use crate::model::{DIRECTION_FORWARD, LABEL_CAUSAL};
use crate::text::{CharIndex, NormalizationPolicy};

pub(crate) fn parse_file(path: &Path, policy: NormalizationPolicy) -> Result<ParseOutput> {
    let rel = read_source(path)?;
    let txt_path = path.with_extension("txt");
    let doc = file_stem(path);
    let txt = if txt_path.exists() {
        Some(read_source(&txt_path)?)
    } else {
        None
    };
    Ok(parse_str(&rel, txt.as_deref(), &doc, policy))
}

fn range(field: &str) -> Option<(usize, usize)> {
    let (s, e) = field.trim().split_once(':')?;
    let (s, e) = (s.trim().parse().ok()?, e.trim().parse().ok()?);
    (s < e).then_some((s, e))
}

/// `document` is `None` when the article text is unavailable; every
/// relation is then skipped as MISSING_TEXT.
pub fn parse_str(
    rel: &str,
    document: Option<&str>,
    doc: &str,
    policy: NormalizationPolicy,
) -> ParseOutput {
    let mut out = ParseOutput::default();
    let index = document.map(CharIndex::new);
    for (i, line) in rel.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        out.candidates += 1;
        let cols: Vec<&str> = line.split('\t').collect();
        let id = cols.first().map(|s| s.trim()).filter(|s| !s.is_empty());
        let original_id = format!("{doc}:{}", id.map_or_else(|| format!("line{}", i + 1), str::to_string));
        let (Some(document), Some(index)) = (document, index.as_ref()) else {
            out.skip(original_id, SkipReason::MissingText, "no paired .txt");
            continue;
        };
        if cols.len() != 4 {
            out.skip(original_id, SkipReason::Malformed, format!("expected 4 columns, got {}", cols.len()));
            continue;
        }
        match cols[1].trim() {
            "C" => {}
            "R" => {
                out.skip(original_id, SkipReason::ExcludedRelationType, "relatedness relation");
                continue;
            }
            other => {
                out.skip(original_id, SkipReason::Malformed, format!("unknown relation type {other:?}"));
                continue;
            }
        }
        let (Some(cause), Some(effect)) = (range(cols[2]), range(cols[3])) else {
            out.skip(original_id, SkipReason::Malformed, "unreadable offsets");
            continue;
        };
        if cause.1 > index.len() || effect.1 > index.len() {
            out.skip(original_id, SkipReason::Malformed, "offsets outside the article");
            continue;
        }
        match Draft::from_document(
            original_id.clone(),
            document,
            vec![cause],
            vec![effect],
            Vec::new(),
            LABEL_CAUSAL,
            DIRECTION_FORWARD,
        ) {
            Some(draft) => out.push_draft(draft, super::EVENT_CAUSALITY, policy),
            None => out.skip(original_id, SkipReason::Malformed, "could not cut a context window"),
        }
    }
    out
}
