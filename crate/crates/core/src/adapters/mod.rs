//! Source-format adapters.
//!
//! Each adapter turns one dataset's native annotation files into
//! [`CrestRelation`]s plus a [`SkipRecord`] for every source annotation it
//! did not convert. Every adapter also counts its candidate annotations
//! independently so that `relations + skips == candidates` can be checked.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::context::project;
use crate::error::{Error, Result};
use crate::model::{validate_relation, CrestRelation, SPLIT_UNASSIGNED};
use crate::text::{sentence_window, CharIndex, NormalizationPolicy};

pub mod because;
pub mod caters;
pub mod copa;
pub mod eventcausality;
pub mod eventstoryline;
pub mod pdtb3;
pub mod semeval;
pub mod standoff;
pub mod timebank;

pub const SEMEVAL_2007: u32 = 1;
pub const SEMEVAL_2010: u32 = 2;
pub const EVENT_CAUSALITY: u32 = 3;
pub const CAUSAL_TIMEBANK: u32 = 4;
pub const EVENT_STORY_LINE: u32 = 5;
pub const CATERS: u32 = 6;
pub const BECAUSE: u32 = 7;
pub const COPA: u32 = 8;
pub const PDTB3: u32 = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SkipReason {
    ExcludedSense,
    ExcludedRelationType,
    Malformed,
    MissingText,
}

impl SkipReason {
    pub fn as_str(self) -> &'static str {
        match self {
            SkipReason::ExcludedSense => "EXCLUDED_SENSE",
            SkipReason::ExcludedRelationType => "EXCLUDED_RELATION_TYPE",
            SkipReason::Malformed => "MALFORMED",
            SkipReason::MissingText => "MISSING_TEXT",
        }
    }
}

impl fmt::Display for SkipReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A source annotation that was not converted, and why.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkipRecord {
    pub original_id: String,
    pub reason: SkipReason,
    #[serde(skip)]
    pub detail: String,
}

impl SkipRecord {
    pub fn new(original_id: impl Into<String>, reason: SkipReason, detail: impl Into<String>) -> Self {
        SkipRecord {
            original_id: original_id.into(),
            reason,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParseOutput {
    pub relations: Vec<CrestRelation>,
    pub skips: Vec<SkipRecord>,
    /// Source annotations seen, counted independently of the outcome.
    pub candidates: usize,
}

impl ParseOutput {
    pub fn extend(&mut self, other: ParseOutput) {
        self.relations.extend(other.relations);
        self.skips.extend(other.skips);
        self.candidates += other.candidates;
    }

    pub fn is_conserved(&self) -> bool {
        self.relations.len() + self.skips.len() == self.candidates
    }

    pub(crate) fn skip(&mut self, id: impl Into<String>, reason: SkipReason, detail: impl Into<String>) {
        self.skips.push(SkipRecord::new(id, reason, detail));
    }

    /// Builds, validates and records a draft; invalid drafts become MALFORMED skips.
    pub(crate) fn push_draft(&mut self, draft: Draft, dataset_id: u32, policy: NormalizationPolicy) {
        match draft.build(dataset_id, policy) {
            Ok(rel) => self.relations.push(rel),
            Err(skip) => self.skips.push(skip),
        }
    }
}

/// A relation located in raw text, before normalization.
#[derive(Debug, Clone)]
pub(crate) struct Draft {
    pub original_id: String,
    pub raw_context: String,
    pub span1: Vec<(usize, usize)>,
    pub span2: Vec<(usize, usize)>,
    pub signal: Vec<(usize, usize)>,
    pub label: i32,
    pub direction: i32,
}

impl Draft {
    /// Cuts the sentence window covering every fragment out of a whole
    /// document and rebases the fragments onto it.
    pub fn from_document(
        original_id: String,
        document: &str,
        span1: Vec<(usize, usize)>,
        span2: Vec<(usize, usize)>,
        signal: Vec<(usize, usize)>,
        label: i32,
        direction: i32,
    ) -> Option<Draft> {
        let all = span1.iter().chain(&span2).chain(&signal);
        let lo = all.clone().map(|r| r.0).min()?;
        let hi = all.map(|r| r.1).max()?;
        let (ws, we) = sentence_window(document, lo, hi);
        let raw_context = CharIndex::new(document).slice(ws, we)?.to_string();
        let rebase = |v: Vec<(usize, usize)>| v.into_iter().map(|(s, e)| (s - ws, e - ws)).collect();
        Some(Draft {
            original_id,
            raw_context,
            span1: rebase(span1),
            span2: rebase(span2),
            signal: rebase(signal),
            label,
            direction,
        })
    }

    pub fn build(self, dataset_id: u32, policy: NormalizationPolicy) -> std::result::Result<CrestRelation, SkipRecord> {
        let projected = project(
            &self.raw_context,
            &[self.span1, self.span2, self.signal],
            policy,
        );
        let mut spans = projected.spans.into_iter();
        let rel = CrestRelation {
            original_id: self.original_id,
            dataset_id,
            span1: spans.next().unwrap_or_default(),
            span2: spans.next().unwrap_or_default(),
            signal: spans.next().unwrap_or_default(),
            context: projected.context,
            label: self.label,
            direction: self.direction,
            split: SPLIT_UNASSIGNED,
        };
        let report = validate_relation(&rel, policy);
        if report.is_valid() {
            Ok(rel)
        } else {
            Err(SkipRecord::new(
                rel.original_id,
                SkipReason::Malformed,
                format!("converted relation fails validation: {report}"),
            ))
        }
    }
}

/// One registered dataset adapter.
#[derive(Clone, Copy)]
pub struct AdapterSpec {
    pub dataset_id: u32,
    pub name: &'static str,
    /// Whether the source annotates signal/trigger tokens.
    pub has_signal: bool,
    accepts: fn(&Path) -> bool,
    parse_file: fn(&Path, NormalizationPolicy) -> Result<ParseOutput>,
}

impl fmt::Debug for AdapterSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AdapterSpec")
            .field("dataset_id", &self.dataset_id)
            .field("name", &self.name)
            .field("has_signal", &self.has_signal)
            .finish()
    }
}

fn has_ext(path: &Path, exts: &[&str]) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| exts.iter().any(|x| x.eq_ignore_ascii_case(e)))
}

fn any_file(_: &Path) -> bool {
    true
}

fn xml_file(p: &Path) -> bool {
    has_ext(p, &["xml"])
}

fn timeml_file(p: &Path) -> bool {
    has_ext(p, &["tml", "xml"])
}

fn ann_file(p: &Path) -> bool {
    has_ext(p, &["ann"])
}

fn rel_file(p: &Path) -> bool {
    has_ext(p, &["rel"])
}

static REGISTRY: [AdapterSpec; 9] = [
    AdapterSpec {
        dataset_id: SEMEVAL_2007,
        name: "semeval2007",
        has_signal: false,
        accepts: any_file,
        parse_file: semeval::parse_file_2007,
    },
    AdapterSpec {
        dataset_id: SEMEVAL_2010,
        name: "semeval2010",
        has_signal: false,
        accepts: any_file,
        parse_file: semeval::parse_file_2010,
    },
    AdapterSpec {
        dataset_id: EVENT_CAUSALITY,
        name: "eventcausality",
        has_signal: false,
        accepts: rel_file,
        parse_file: eventcausality::parse_file,
    },
    AdapterSpec {
        dataset_id: CAUSAL_TIMEBANK,
        name: "causal-timebank",
        has_signal: true,
        accepts: timeml_file,
        parse_file: timebank::parse_file,
    },
    AdapterSpec {
        dataset_id: EVENT_STORY_LINE,
        name: "eventstoryline",
        has_signal: true,
        accepts: xml_file,
        parse_file: eventstoryline::parse_file,
    },
    AdapterSpec {
        dataset_id: CATERS,
        name: "caters",
        has_signal: false,
        accepts: ann_file,
        parse_file: caters::parse_file,
    },
    AdapterSpec {
        dataset_id: BECAUSE,
        name: "because",
        has_signal: true,
        accepts: ann_file,
        parse_file: because::parse_file,
    },
    AdapterSpec {
        dataset_id: COPA,
        name: "copa",
        has_signal: false,
        accepts: xml_file,
        parse_file: copa::parse_file,
    },
    AdapterSpec {
        dataset_id: PDTB3,
        name: "pdtb3",
        has_signal: true,
        accepts: pdtb3::is_record_file,
        parse_file: pdtb3::parse_file,
    },
];

pub fn registry() -> &'static [AdapterSpec] {
    &REGISTRY
}

pub fn adapter_by_id(dataset_id: u32) -> Result<&'static AdapterSpec> {
    REGISTRY
        .iter()
        .find(|a| a.dataset_id == dataset_id)
        .ok_or(Error::UnknownDataset(dataset_id))
}

pub fn adapter_by_name(name: &str) -> Result<&'static AdapterSpec> {
    REGISTRY
        .iter()
        .find(|a| a.name.eq_ignore_ascii_case(name))
        .ok_or_else(|| Error::UnknownAdapter(name.to_string()))
}

/// Short label used in reports.
pub fn dataset_short_name(dataset_id: u32) -> &'static str {
    match dataset_id {
        SEMEVAL_2007 => "SemEval-2007",
        SEMEVAL_2010 => "SemEval-2010",
        EVENT_CAUSALITY => "EventCausality",
        CAUSAL_TIMEBANK => "Causal-TimeBank",
        EVENT_STORY_LINE => "ESL",
        CATERS => "CaTeRS",
        BECAUSE => "BECauSE",
        COPA => "COPA",
        PDTB3 => "PDTB3",
        _ => "unknown",
    }
}

fn collect_files(path: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    let meta = std::fs::metadata(path).map_err(|e| Error::io(path, e))?;
    if meta.is_dir() {
        let entries = std::fs::read_dir(path).map_err(|e| Error::io(path, e))?;
        for entry in entries {
            let entry = entry.map_err(|e| Error::io(path, e))?;
            collect_files(&entry.path(), out)?;
        }
    } else {
        out.push(path.to_path_buf());
    }
    Ok(())
}

impl AdapterSpec {
    /// Source files this adapter would read for the given inputs
    /// (directories are walked), in deterministic order.
    pub fn source_files(&self, inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
        let mut files = Vec::new();
        for input in inputs {
            collect_files(input, &mut files)?;
        }
        files.retain(|p| (self.accepts)(p));
        files.sort();
        files.dedup();
        Ok(files)
    }

    pub fn parse_file(&self, path: &Path, policy: NormalizationPolicy) -> Result<ParseOutput> {
        let mut out = (self.parse_file)(path, policy)?;
        for rel in &mut out.relations {
            rel.dataset_id = self.dataset_id;
        }
        Ok(out)
    }
}

/// Runs an adapter over files and directories, merging per-file results in
/// file-name order.
pub fn parse_with_adapter(
    adapter: &AdapterSpec,
    inputs: &[PathBuf],
    policy: NormalizationPolicy,
) -> Result<ParseOutput> {
    use rayon::prelude::*;

    let files = adapter.source_files(inputs)?;
    let parsed: Vec<Result<ParseOutput>> = files
        .par_iter()
        .map(|f| adapter.parse_file(f, policy))
        .collect();
    let mut out = ParseOutput::default();
    for part in parsed {
        out.extend(part?);
    }
    log::info!(
        "{}: {} relations, {} skips from {} file(s)",
        adapter.name,
        out.relations.len(),
        out.skips.len(),
        files.len()
    );
    Ok(out)
}

/// Reads a source file, mapping failures to the crate error.
pub(crate) fn read_source(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

pub(crate) fn source_error(path: &Path, message: impl Into<String>) -> Error {
    Error::Source {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_ids_are_one_to_nine() {
        let ids: Vec<u32> = registry().iter().map(|a| a.dataset_id).collect();
        assert_eq!(ids, (1..=9).collect::<Vec<_>>());
    }

    #[test]
    fn signal_columns() {
        let with_signal: Vec<u32> = registry()
            .iter()
            .filter(|a| a.has_signal)
            .map(|a| a.dataset_id)
            .collect();
        assert_eq!(with_signal, vec![4, 5, 7, 9]);
    }

    #[test]
    fn unknown_id_is_an_error() {
        assert!(matches!(adapter_by_id(10), Err(Error::UnknownDataset(10))));
        assert!(matches!(adapter_by_id(0), Err(Error::UnknownDataset(0))));
        assert!(adapter_by_name("nope").is_err());
        assert_eq!(adapter_by_name("COPA").unwrap().dataset_id, COPA);
    }

    #[test]
    fn draft_window_and_rebase() {
        let doc = "Intro here. The dam broke because of the storm. Later text.";
        let dam = doc.find("broke").unwrap();
        let storm = doc.find("storm").unwrap();
        let because = doc.find("because of").unwrap();
        let draft = Draft::from_document(
            "d1".into(),
            doc,
            vec![(dam, dam + 5)],
            vec![(storm, storm + 5)],
            vec![(because, because + 10)],
            1,
            1,
        )
        .unwrap();
        let rel = draft.build(BECAUSE, NormalizationPolicy::NfcCollapse).unwrap();
        assert_eq!(rel.context, "The dam broke because of the storm.");
        assert_eq!(rel.span1.tokens, vec!["broke"]);
        assert_eq!(rel.signal.tokens, vec!["because", "of"]);
    }

    #[test]
    fn invalid_draft_becomes_malformed_skip() {
        let draft = Draft {
            original_id: "x".into(),
            raw_context: "a b".into(),
            span1: vec![(0, 1)],
            span2: vec![(0, 1)],
            signal: vec![],
            label: 1,
            direction: 0,
        };
        let skip = draft.build(1, NormalizationPolicy::NfcCollapse).unwrap_err();
        assert_eq!(skip.reason, SkipReason::Malformed);
    }
}
