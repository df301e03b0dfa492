//! JSON-lines storage for corpora, one relation per line.
//!
//! Field names and order are fixed: `original_id`, `dataset_id`, `span1`,
//! `span2`, `signal`, `context`, `idx`, `label`, `direction`, `split`, where
//! `idx` maps `span1`/`span2`/`signal` to lists of `[start, end]` pairs.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{validate_relation, Corpus, CrestRelation, TokenSpan};
use crate::text::NormalizationPolicy;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireIdx {
    span1: Vec<[usize; 2]>,
    span2: Vec<[usize; 2]>,
    signal: Vec<[usize; 2]>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireRelation {
    original_id: String,
    dataset_id: u32,
    span1: Vec<String>,
    span2: Vec<String>,
    signal: Vec<String>,
    context: String,
    idx: WireIdx,
    label: i32,
    direction: i32,
    split: i32,
}

fn pairs(offsets: &[(usize, usize)]) -> Vec<[usize; 2]> {
    offsets.iter().map(|&(s, e)| [s, e]).collect()
}

fn span(tokens: Vec<String>, offsets: Vec<[usize; 2]>) -> TokenSpan {
    TokenSpan::new(tokens, offsets.into_iter().map(|[s, e]| (s, e)).collect())
}

impl From<&CrestRelation> for WireRelation {
    fn from(rel: &CrestRelation) -> Self {
        WireRelation {
            original_id: rel.original_id.clone(),
            dataset_id: rel.dataset_id,
            span1: rel.span1.tokens.clone(),
            span2: rel.span2.tokens.clone(),
            signal: rel.signal.tokens.clone(),
            context: rel.context.clone(),
            idx: WireIdx {
                span1: pairs(&rel.span1.offsets),
                span2: pairs(&rel.span2.offsets),
                signal: pairs(&rel.signal.offsets),
            },
            label: rel.label,
            direction: rel.direction,
            split: rel.split,
        }
    }
}

impl From<WireRelation> for CrestRelation {
    fn from(w: WireRelation) -> Self {
        CrestRelation {
            original_id: w.original_id,
            dataset_id: w.dataset_id,
            span1: span(w.span1, w.idx.span1),
            span2: span(w.span2, w.idx.span2),
            signal: span(w.signal, w.idx.signal),
            context: w.context,
            label: w.label,
            direction: w.direction,
            split: w.split,
        }
    }
}

/// Serializes one relation as a single JSON line (no trailing newline).
pub fn relation_to_line(rel: &CrestRelation) -> String {
    serde_json::to_string(&WireRelation::from(rel)).expect("relation serializes")
}

pub fn relation_from_line(line: &str) -> std::result::Result<CrestRelation, serde_json::Error> {
    serde_json::from_str::<WireRelation>(line).map(CrestRelation::from)
}

/// Serializes a corpus to the JSONL byte format. Fails on the first relation
/// that does not validate.
pub fn corpus_to_string(corpus: &Corpus) -> Result<String> {
    let mut out = String::new();
    for (i, rel) in corpus.relations.iter().enumerate() {
        let report = validate_relation(rel, corpus.normalization);
        if !report.is_valid() {
            return Err(Error::InvalidRecord {
                line: i + 1,
                original_id: rel.original_id.clone(),
                report,
            });
        }
        out.push_str(&relation_to_line(rel));
        out.push('\n');
    }
    Ok(out)
}

pub fn write_corpus(corpus: &Corpus, path: &Path) -> Result<()> {
    let body = corpus_to_string(corpus)?;
    std::fs::write(path, body).map_err(|e| Error::io(path, e))
}

/// Parses JSONL text without validating relations. Blank lines are skipped;
/// a line that is not a relation object fails with its 1-based line number.
pub fn parse_relations(text: &str) -> Result<Vec<(usize, CrestRelation)>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            relation_from_line(l)
                .map(|rel| (i + 1, rel))
                .map_err(|e| Error::MalformedLine {
                    line: i + 1,
                    message: e.to_string(),
                })
        })
        .collect()
}

fn source_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// Reads a corpus, validating every record. The corpus is named after the
/// file stem.
pub fn read_corpus(path: &Path, policy: NormalizationPolicy) -> Result<Corpus> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    corpus_from_str(&text, &source_name(path), policy)
}

pub fn corpus_from_str(text: &str, source_name: &str, policy: NormalizationPolicy) -> Result<Corpus> {
    let mut seen = std::collections::HashSet::new();
    let mut relations = Vec::new();
    for (line, rel) in parse_relations(text)? {
        let report = validate_relation(&rel, policy);
        if !report.is_valid() {
            return Err(Error::InvalidRecord {
                line,
                original_id: rel.original_id,
                report,
            });
        }
        if !seen.insert((rel.dataset_id, rel.original_id.clone())) {
            return Err(Error::DuplicateId {
                line,
                original_id: rel.original_id,
            });
        }
        relations.push(rel);
    }
    Ok(Corpus::with_relations(source_name, policy, relations))
}

/// Reads a corpus without rejecting invalid records; findings go to the
/// validation ledger instead.
pub fn read_corpus_lenient(path: &Path, policy: NormalizationPolicy) -> Result<Corpus> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let relations = parse_relations(&text)?.into_iter().map(|(_, r)| r).collect();
    let mut corpus = Corpus::with_relations(source_name(path), policy, relations);
    corpus.revalidate();
    Ok(corpus)
}

/// Writes any serializable rows as JSON lines.
pub fn write_jsonl<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for row in rows {
        serde_json::to_writer(&mut out, row)?;
        out.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rows = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        rows.push(serde_json::from_str(&line).map_err(|e| Error::MalformedLine {
            line: i + 1,
            message: e.to_string(),
        })?);
    }
    Ok(rows)
}
