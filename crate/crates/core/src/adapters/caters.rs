//! CaTeRS story annotations (brat standoff, one `.ann`/`.txt` pair per story).
//!
//! Links are `R` lines such as `R1\tCAUSE_BEFORE Arg1:T1 Arg2:T2`, with
//! `Arg1` the cause. `CAUSE_*` and `ENABLE_*` links are causal; `PREVENT_*`
//! and purely temporal links are excluded. Events may sit in different
//! sentences, so the context is the sentence window covering both.
//! CaTeRS annotates no signal words.

use std::path::Path;

use super::standoff::{paired_text, Annotation, RelationLine};
use super::{file_stem, read_source, Draft, ParseOutput, SkipReason};
use crate::error::Result;
use crate::model::{DIRECTION_FORWARD, LABEL_CAUSAL};
use crate::text::{CharIndex, NormalizationPolicy};

pub(crate) fn parse_file(path: &Path, policy: NormalizationPolicy) -> Result<ParseOutput> {
    let ann = read_source(path)?;
    let txt_path = paired_text(path);
    let doc = file_stem(path);
    if !txt_path.exists() {
        let mut out = ParseOutput::default();
        for rel in Annotation::parse(&ann).relations {
            out.candidates += 1;
            out.skip(format!("{doc}:{}", rel.id), SkipReason::MissingText, "no paired .txt");
        }
        return Ok(out);
    }
    let txt = read_source(&txt_path)?;
    Ok(parse_str(&ann, &txt, &doc, policy))
}

fn is_causal_link(kind: &str) -> bool {
    let upper = kind.to_ascii_uppercase();
    upper.starts_with("CAUSE") || upper.starts_with("ENABLE")
}

fn link_draft(
    link: &RelationLine,
    annotation: &Annotation,
    document: &str,
    index: &CharIndex<'_>,
    original_id: String,
) -> std::result::Result<Draft, (SkipReason, String)> {
    if !is_causal_link(&link.kind) {
        return Err((SkipReason::ExcludedRelationType, format!("link type {}", link.kind)));
    }
    let malformed = |m: String| (SkipReason::Malformed, m);
    let arg = |name: &str| {
        link.args
            .iter()
            .find(|(r, _)| r == name)
            .map(|(_, t)| t.as_str())
            .ok_or_else(|| malformed(format!("link has no {name}")))
    };
    let cause = annotation.resolve(arg("Arg1")?, index).map_err(malformed)?;
    let effect = annotation.resolve(arg("Arg2")?, index).map_err(malformed)?;
    Draft::from_document(
        original_id,
        document,
        cause.fragments.clone(),
        effect.fragments.clone(),
        Vec::new(),
        LABEL_CAUSAL,
        DIRECTION_FORWARD,
    )
    .ok_or_else(|| malformed("could not cut a context window".into()))
}

pub fn parse_str(ann: &str, document: &str, doc: &str, policy: NormalizationPolicy) -> ParseOutput {
    let annotation = Annotation::parse(ann);
    let index = CharIndex::new(document);
    let mut out = ParseOutput::default();
    for link in &annotation.relations {
        out.candidates += 1;
        let original_id = format!("{doc}:{}", link.id);
        match link_draft(link, &annotation, document, &index, original_id.clone()) {
            Ok(draft) => out.push_draft(draft, super::CATERS, policy),
            Err((reason, detail)) => out.skip(original_id, reason, detail),
        }
    }
    out
}
