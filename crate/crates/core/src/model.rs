//! The unified relation schema and its validation rules.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::text::{CharIndex, NormalizationPolicy};

pub const LABEL_NON_CAUSAL: i32 = 0;
pub const LABEL_CAUSAL: i32 = 1;

/// `span1 => span2`: span1 is the cause.
pub const DIRECTION_FORWARD: i32 = 0;
/// `span1 <= span2`: span2 is the cause.
pub const DIRECTION_BACKWARD: i32 = 1;
/// Non-causal relations and sources that annotate no direction.
pub const DIRECTION_UNDEFINED: i32 = -1;

pub const SPLIT_TRAIN: i32 = 0;
pub const SPLIT_DEV: i32 = 1;
pub const SPLIT_TEST: i32 = 2;
pub const SPLIT_UNASSIGNED: i32 = -1;

/// Tokens of one argument plus their `[start, end)` char offsets into the context.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct TokenSpan {
    pub tokens: Vec<String>,
    pub offsets: Vec<(usize, usize)>,
}

impl TokenSpan {
    pub fn new(tokens: Vec<String>, offsets: Vec<(usize, usize)>) -> Self {
        TokenSpan { tokens, offsets }
    }

    pub fn empty() -> Self {
        TokenSpan::default()
    }

    /// Builds a span by slicing `context` at the given char ranges.
    pub fn from_offsets(context: &str, offsets: Vec<(usize, usize)>) -> Option<Self> {
        let idx = CharIndex::new(context);
        let tokens = offsets
            .iter()
            .map(|&(s, e)| idx.slice(s, e).map(str::to_string))
            .collect::<Option<Vec<_>>>()?;
        Some(TokenSpan { tokens, offsets })
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty() && self.offsets.is_empty()
    }

    /// First token start to last token end.
    pub fn extent(&self) -> Option<(usize, usize)> {
        let first = self.offsets.first()?;
        let last = self.offsets.last()?;
        Some((first.0, last.1))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CrestRelation {
    pub original_id: String,
    pub dataset_id: u32,
    pub span1: TokenSpan,
    pub span2: TokenSpan,
    pub signal: TokenSpan,
    pub context: String,
    pub label: i32,
    pub direction: i32,
    pub split: i32,
}

impl CrestRelation {
    pub fn is_causal(&self) -> bool {
        self.label == LABEL_CAUSAL
    }

    /// (cause, effect) for a causal relation with a defined direction.
    pub fn cause_effect(&self) -> Option<(&TokenSpan, &TokenSpan)> {
        if !self.is_causal() {
            return None;
        }
        match self.direction {
            DIRECTION_FORWARD => Some((&self.span1, &self.span2)),
            DIRECTION_BACKWARD => Some((&self.span2, &self.span1)),
            _ => None,
        }
    }

    /// Same relation with the direction flag inverted (causal relations only).
    pub fn flipped(&self) -> CrestRelation {
        let mut out = self.clone();
        out.direction = match self.direction {
            DIRECTION_FORWARD => DIRECTION_BACKWARD,
            DIRECTION_BACKWARD => DIRECTION_FORWARD,
            d => d,
        };
        out
    }
}

/// Which token list of a relation an issue refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpanField {
    Span1,
    Span2,
    Signal,
}

impl SpanField {
    pub const ALL: [SpanField; 3] = [SpanField::Span1, SpanField::Span2, SpanField::Signal];

    pub fn as_str(self) -> &'static str {
        match self {
            SpanField::Span1 => "span1",
            SpanField::Span2 => "span2",
            SpanField::Signal => "signal",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum IssueCode {
    /// A token differs from the context slice at its offsets.
    OffsetMismatch,
    /// span1 or span2 has no tokens.
    EmptySpan,
    BadLabel,
    BadDirection,
    BadSplit,
    /// label 1 with direction -1.
    DirectionlessCausal,
    /// span1 and span2 extents overlap (partially or by nesting).
    SpanInterleave,
    /// start >= end, or end past the context.
    OffsetOutOfRange,
    /// tokens and offsets lists differ in length.
    TokenCountMismatch,
    /// offsets inside one span are not strictly increasing and disjoint.
    OffsetOrder,
    /// The context is not in the corpus's normal form.
    ContextNotNormalized,
    /// Two relations of one dataset share an original_id (corpus-level).
    DuplicateId,
}

impl IssueCode {
    pub fn as_str(self) -> &'static str {
        match self {
            IssueCode::OffsetMismatch => "OFFSET_MISMATCH",
            IssueCode::EmptySpan => "EMPTY_SPAN",
            IssueCode::BadLabel => "BAD_LABEL",
            IssueCode::BadDirection => "BAD_DIRECTION",
            IssueCode::BadSplit => "BAD_SPLIT",
            IssueCode::DirectionlessCausal => "DIRECTIONLESS_CAUSAL",
            IssueCode::SpanInterleave => "SPAN_INTERLEAVE",
            IssueCode::OffsetOutOfRange => "OFFSET_OUT_OF_RANGE",
            IssueCode::TokenCountMismatch => "TOKEN_COUNT_MISMATCH",
            IssueCode::OffsetOrder => "OFFSET_ORDER",
            IssueCode::ContextNotNormalized => "CONTEXT_NOT_NORMALIZED",
            IssueCode::DuplicateId => "DUPLICATE_ID",
        }
    }
}

impl fmt::Display for IssueCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Issue {
    pub code: IssueCode,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub field: Option<SpanField>,
    /// Token position inside the field, when the issue is about one token.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub token: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn codes(&self) -> Vec<IssueCode> {
        let mut codes: Vec<IssueCode> = self.issues.iter().map(|i| i.code).collect();
        codes.sort();
        codes.dedup();
        codes
    }

    pub fn contains(&self, code: IssueCode) -> bool {
        self.issues.iter().any(|i| i.code == code)
    }

    fn push(&mut self, code: IssueCode, field: Option<SpanField>, token: Option<usize>) {
        self.issues.push(Issue { code, field, token });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .issues
            .iter()
            .map(|i| match (i.field, i.token) {
                (Some(field), Some(t)) => format!("{}@{}[{}]", i.code, field.as_str(), t),
                (Some(field), None) => format!("{}@{}", i.code, field.as_str()),
                _ => i.code.to_string(),
            })
            .collect();
        f.write_str(&parts.join(", "))
    }
}

fn check_span(
    report: &mut ValidationReport,
    field: SpanField,
    span: &TokenSpan,
    context: &CharIndex<'_>,
) {
    if span.tokens.len() != span.offsets.len() {
        report.push(IssueCode::TokenCountMismatch, Some(field), None);
    }
    let mut prev_end: Option<usize> = None;
    let mut ordered = true;
    for (i, &(start, end)) in span.offsets.iter().enumerate() {
        if start >= end || end > context.len() {
            report.push(IssueCode::OffsetOutOfRange, Some(field), Some(i));
        } else if let Some(token) = span.tokens.get(i) {
            if context.slice(start, end) != Some(token.as_str()) {
                report.push(IssueCode::OffsetMismatch, Some(field), Some(i));
            }
        }
        if matches!(prev_end, Some(p) if start < p) {
            ordered = false;
        }
        prev_end = Some(end);
    }
    if !ordered {
        report.push(IssueCode::OffsetOrder, Some(field), None);
    }
}

/// Checks a candidate record against every schema invariant. Never panics;
/// an empty report means the record is valid.
pub fn validate_relation(rel: &CrestRelation, policy: NormalizationPolicy) -> ValidationReport {
    let mut report = ValidationReport::default();

    if rel.label != LABEL_NON_CAUSAL && rel.label != LABEL_CAUSAL {
        report.push(IssueCode::BadLabel, None, None);
    }
    if !(-1..=1).contains(&rel.direction) {
        report.push(IssueCode::BadDirection, None, None);
    } else if rel.label == LABEL_CAUSAL && rel.direction == DIRECTION_UNDEFINED {
        report.push(IssueCode::DirectionlessCausal, None, None);
    }
    if !(-1..=2).contains(&rel.split) {
        report.push(IssueCode::BadSplit, None, None);
    }
    if !policy.is_normalized(&rel.context) {
        report.push(IssueCode::ContextNotNormalized, None, None);
    }

    let context = CharIndex::new(&rel.context);
    for (field, span) in [
        (SpanField::Span1, &rel.span1),
        (SpanField::Span2, &rel.span2),
    ] {
        if span.tokens.is_empty() || span.offsets.is_empty() {
            report.push(IssueCode::EmptySpan, Some(field), None);
        }
        check_span(&mut report, field, span, &context);
    }
    check_span(&mut report, SpanField::Signal, &rel.signal, &context);

    if let (Some((s1, e1)), Some((s2, e2))) = (rel.span1.extent(), rel.span2.extent()) {
        let disjoint = e1 <= s2 || e2 <= s1;
        if !disjoint {
            report.push(IssueCode::SpanInterleave, None, None);
        }
    }
    report
}

/// One corpus-level validation finding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub index: usize,
    pub code: IssueCode,
}

/// An ordered collection of relations from one source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    pub relations: Vec<CrestRelation>,
    pub source_name: String,
    pub normalization: NormalizationPolicy,
    pub validation_ledger: Vec<LedgerEntry>,
}

impl Corpus {
    pub fn new(source_name: impl Into<String>, normalization: NormalizationPolicy) -> Self {
        Corpus {
            relations: Vec::new(),
            source_name: source_name.into(),
            normalization,
            validation_ledger: Vec::new(),
        }
    }

    pub fn with_relations(
        source_name: impl Into<String>,
        normalization: NormalizationPolicy,
        relations: Vec<CrestRelation>,
    ) -> Self {
        Corpus {
            relations,
            ..Corpus::new(source_name, normalization)
        }
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    /// Re-validates every relation and the id-uniqueness rule, replacing the
    /// ledger. Returns true when the ledger ends up empty.
    pub fn revalidate(&mut self) -> bool {
        let mut ledger = Vec::new();
        let mut seen: HashMap<(u32, &str), usize> = HashMap::new();
        for (index, rel) in self.relations.iter().enumerate() {
            for code in validate_relation(rel, self.normalization).codes() {
                ledger.push(LedgerEntry { index, code });
            }
            if seen.insert((rel.dataset_id, rel.original_id.as_str()), index).is_some() {
                ledger.push(LedgerEntry {
                    index,
                    code: IssueCode::DuplicateId,
                });
            }
        }
        self.validation_ledger = ledger;
        self.validation_ledger.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FLOOD: &str =
        "The river had now turned into full flood after the deluge of rain a few days ago.";

    fn span(tokens: &[&str], offsets: &[(usize, usize)]) -> TokenSpan {
        TokenSpan::new(
            tokens.iter().map(|t| t.to_string()).collect(),
            offsets.to_vec(),
        )
    }

    fn flood() -> CrestRelation {
        CrestRelation {
            original_id: "flood-1".into(),
            dataset_id: 0,
            span1: span(&["flood"], &[(35, 40)]),
            span2: span(&["deluge", "of", "rain"], &[(51, 57), (58, 60), (61, 65)]),
            signal: TokenSpan::empty(),
            context: FLOOD.into(),
            label: 1,
            direction: 1,
            split: -1,
        }
    }

    #[test]
    fn flood_example_is_valid() {
        let report = validate_relation(&flood(), NormalizationPolicy::NfcCollapse);
        assert!(report.is_valid(), "{report}");
    }

    #[test]
    fn truncated_offset_is_a_mismatch() {
        let mut rel = flood();
        rel.span1.offsets = vec![(35, 39)];
        let report = validate_relation(&rel, NormalizationPolicy::NfcCollapse);
        assert_eq!(report.codes(), vec![IssueCode::OffsetMismatch]);
    }

    #[test]
    fn causal_without_direction() {
        let mut rel = flood();
        rel.direction = -1;
        let report = validate_relation(&rel, NormalizationPolicy::NfcCollapse);
        assert_eq!(report.codes(), vec![IssueCode::DirectionlessCausal]);
    }

    #[test]
    fn non_causal_may_carry_any_direction() {
        let mut rel = flood();
        rel.label = 0;
        for d in [-1, 0, 1] {
            rel.direction = d;
            assert!(validate_relation(&rel, NormalizationPolicy::None).is_valid());
        }
    }

    #[test]
    fn garbage_record_reports_without_panicking() {
        let rel = CrestRelation {
            original_id: String::new(),
            dataset_id: 99,
            span1: span(&["x", "y"], &[(usize::MAX, 0)]),
            span2: TokenSpan::empty(),
            signal: span(&[], &[(0, 1), (0, 1)]),
            context: String::new(),
            label: 7,
            direction: -9,
            split: 42,
        };
        let codes = validate_relation(&rel, NormalizationPolicy::NfcCollapse).codes();
        for expected in [
            IssueCode::BadLabel,
            IssueCode::BadDirection,
            IssueCode::BadSplit,
            IssueCode::EmptySpan,
            IssueCode::TokenCountMismatch,
            IssueCode::OffsetOutOfRange,
            IssueCode::OffsetOrder,
        ] {
            assert!(codes.contains(&expected), "missing {expected}");
        }
    }

    #[test]
    fn nested_spans_are_rejected() {
        let mut rel = flood();
        rel.span1 = span(&["of"], &[(58, 60)]);
        let report = validate_relation(&rel, NormalizationPolicy::None);
        assert_eq!(report.codes(), vec![IssueCode::SpanInterleave]);
    }

    #[test]
    fn multibyte_offsets_count_chars() {
        let mut rel = flood();
        rel.context = "Ölflut: full flood after the deluge of rain.".into();
        rel.span1 = span(&["flood"], &[(13, 18)]);
        rel.span2 = span(&["deluge", "of", "rain"], &[(29, 35), (36, 38), (39, 43)]);
        assert!(validate_relation(&rel, NormalizationPolicy::NfcCollapse).is_valid());
    }

    #[test]
    fn duplicate_ids_land_in_the_ledger() {
        let mut corpus =
            Corpus::with_relations("t", NormalizationPolicy::NfcCollapse, vec![flood(), flood()]);
        assert!(!corpus.revalidate());
        assert_eq!(
            corpus.validation_ledger,
            vec![LedgerEntry {
                index: 1,
                code: IssueCode::DuplicateId
            }]
        );
    }

    #[test]
    fn cause_effect_follows_direction() {
        let rel = flood();
        let (cause, effect) = rel.cause_effect().unwrap();
        assert_eq!(cause.tokens, vec!["deluge", "of", "rain"]);
        assert_eq!(effect.tokens, vec!["flood"]);
        let flipped = rel.flipped();
        let (cause, _) = flipped.cause_effect().unwrap();
        assert_eq!(cause.tokens, vec!["flood"]);
    }
}
