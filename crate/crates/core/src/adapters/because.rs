//! BECauSE v2.1 brat standoff.
//!
//! Each `E` line is a frame: a typed trigger (the connective) plus `Cause`
//! and `Effect` arguments. Frames typed `Consequence`, `Motivation` or
//! `Purpose` are causal; every other frame type (the overlapping temporal,
//! correlation and hypothetical relations) is excluded. The argument that
//! starts first in the text becomes `span1`.

use std::path::Path;

use super::standoff::{paired_text, Annotation, EventLine};
use super::{file_stem, read_source, Draft, ParseOutput, SkipReason};
use crate::error::Result;
use crate::model::{DIRECTION_BACKWARD, DIRECTION_FORWARD, LABEL_CAUSAL};
use crate::text::{CharIndex, NormalizationPolicy};

const CAUSAL_FRAMES: [&str; 3] = ["Consequence", "Motivation", "Purpose"];

pub(crate) fn parse_file(path: &Path, policy: NormalizationPolicy) -> Result<ParseOutput> {
    let ann = read_source(path)?;
    let txt_path = paired_text(path);
    let doc = file_stem(path);
    if !txt_path.exists() {
        let annotation = Annotation::parse(&ann);
        let mut out = ParseOutput::default();
        for ev in &annotation.events {
            out.candidates += 1;
            out.skip(format!("{doc}:{}", ev.id), SkipReason::MissingText, "no paired .txt");
        }
        return Ok(out);
    }
    let txt = read_source(&txt_path)?;
    Ok(parse_str(&ann, &txt, &doc, policy))
}

fn frame_draft(
    ev: &EventLine,
    annotation: &Annotation,
    document: &str,
    index: &CharIndex<'_>,
    original_id: String,
) -> std::result::Result<Draft, (SkipReason, String)> {
    if !CAUSAL_FRAMES.contains(&ev.kind.as_str()) {
        return Err((SkipReason::ExcludedRelationType, format!("frame type {}", ev.kind)));
    }
    let malformed = |m: String| (SkipReason::Malformed, m);
    let role = |name: &str| {
        ev.args
            .iter()
            .find(|(r, _)| r == name)
            .map(|(_, t)| t.as_str())
    };
    let cause_id = role("Cause").ok_or_else(|| malformed("frame has no Cause".into()))?;
    let effect_id = role("Effect").ok_or_else(|| malformed("frame has no Effect".into()))?;
    let trigger_id = ev
        .trigger
        .as_deref()
        .ok_or_else(|| malformed("frame has no trigger".into()))?;

    let cause = annotation.resolve(cause_id, index).map_err(malformed)?;
    let effect = annotation.resolve(effect_id, index).map_err(malformed)?;
    let trigger = annotation.resolve(trigger_id, index).map_err(malformed)?;
    if trigger.text.trim().is_empty() || trigger.fragments.iter().all(|(s, e)| s == e) {
        return Err(malformed("empty trigger; every frame must carry a signal".into()));
    }

    let cause_first = cause.fragments.first().map(|f| f.0) <= effect.fragments.first().map(|f| f.0);
    let (span1, span2, direction) = if cause_first {
        (cause, effect, DIRECTION_FORWARD)
    } else {
        (effect, cause, DIRECTION_BACKWARD)
    };
    Draft::from_document(
        original_id,
        document,
        span1.fragments.clone(),
        span2.fragments.clone(),
        trigger.fragments.clone(),
        LABEL_CAUSAL,
        direction,
    )
    .ok_or_else(|| malformed("could not cut a context window".into()))
}

pub fn parse_str(ann: &str, document: &str, doc: &str, policy: NormalizationPolicy) -> ParseOutput {
    let annotation = Annotation::parse(ann);
    let index = CharIndex::new(document);
    let mut out = ParseOutput::default();
    for ev in &annotation.events {
        out.candidates += 1;
        let original_id = format!("{doc}:{}", ev.id);
        match frame_draft(ev, &annotation, document, &index, original_id.clone()) {
            Ok(draft) => out.push_draft(draft, super::BECAUSE, policy),
            Err((reason, detail)) => out.skip(original_id, reason, detail),
        }
    }
    out
}
