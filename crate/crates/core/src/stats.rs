//! Corpus and split statistics.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::adapters::dataset_short_name;
use crate::model::{Corpus, CrestRelation, TokenSpan, DIRECTION_BACKWARD, DIRECTION_FORWARD, SPLIT_TEST, SPLIT_TRAIN};
use crate::sequence::is_inter_sentence;
use crate::text::whitespace_tokens;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetCounts {
    pub dataset_id: u32,
    pub relations: usize,
    pub causal: usize,
    pub non_causal: usize,
    pub signal_bearing: usize,
    /// Causal relations with a usable direction (what the direction task keeps).
    pub directed: usize,
    /// Assigned relations per split: train, dev, test.
    pub splits: [usize; 3],
    pub unassigned: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectionBalance {
    pub forward: usize,
    pub backward: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub relations: usize,
    pub causal: usize,
    pub non_causal: usize,
    pub signal_bearing: usize,
    /// One entry per dataset id present, ascending.
    pub datasets: Vec<DatasetCounts>,
    pub splits: [usize; 3],
    pub unassigned: usize,
    /// Whitespace tokens per span extent (span1 and span2) -> number of spans.
    pub span_lengths: BTreeMap<usize, usize>,
    pub inter_sentence: usize,
    pub direction: DirectionBalance,
}

fn span_length(context: &str, span: &TokenSpan) -> Option<usize> {
    let (s, e) = span.extent()?;
    Some(whitespace_tokens(context, s, e).len())
}

fn split_slot(rel: &CrestRelation) -> Option<usize> {
    (SPLIT_TRAIN..=SPLIT_TEST).contains(&rel.split).then_some(rel.split as usize)
}

pub fn compute_stats(corpus: &Corpus) -> CorpusStats {
    let mut stats = CorpusStats::default();
    let mut per: BTreeMap<u32, DatasetCounts> = BTreeMap::new();
    for rel in &corpus.relations {
        let d = per.entry(rel.dataset_id).or_insert_with(|| DatasetCounts {
            dataset_id: rel.dataset_id,
            ..DatasetCounts::default()
        });
        d.relations += 1;
        stats.relations += 1;
        if rel.is_causal() {
            d.causal += 1;
            stats.causal += 1;
        } else {
            d.non_causal += 1;
            stats.non_causal += 1;
        }
        if !rel.signal.is_empty() {
            d.signal_bearing += 1;
            stats.signal_bearing += 1;
        }
        if rel.is_causal() {
            match rel.direction {
                DIRECTION_FORWARD => stats.direction.forward += 1,
                DIRECTION_BACKWARD => stats.direction.backward += 1,
                _ => {}
            }
            if matches!(rel.direction, DIRECTION_FORWARD | DIRECTION_BACKWARD) {
                d.directed += 1;
            }
        }
        match split_slot(rel) {
            Some(k) => {
                d.splits[k] += 1;
                stats.splits[k] += 1;
            }
            None => {
                d.unassigned += 1;
                stats.unassigned += 1;
            }
        }
        for span in [&rel.span1, &rel.span2] {
            if let Some(n) = span_length(&rel.context, span) {
                *stats.span_lengths.entry(n).or_default() += 1;
            }
        }
        if is_inter_sentence(rel) {
            stats.inter_sentence += 1;
        }
    }
    stats.datasets = per.into_values().collect();
    stats
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Text,
    Json,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "text" | "table" | "table-text" => Ok(ReportFormat::Text),
            "json" => Ok(ReportFormat::Json),
            other => Err(format!("unknown report format `{other}`")),
        }
    }
}

/// `1234567` -> `1,234,567`.
pub fn thousands(n: usize) -> String {
    let digits = n.to_string();
    let mut out = String::with_capacity(digits.len() + digits.len() / 3);
    for (i, c) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(c);
    }
    out
}

fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |cells: Vec<&str>| {
        let mut l = String::new();
        for (i, (cell, w)) in cells.iter().zip(&widths).enumerate() {
            if i == 0 {
                let _ = write!(l, "{cell:<w$}");
            } else {
                let _ = write!(l, "  {cell:>w$}");
            }
        }
        out.push_str(l.trim_end());
        out.push('\n');
    };
    line(header.to_vec());
    for row in rows {
        line(row.iter().map(String::as_str).collect());
    }
    out
}

fn render_text(s: &CorpusStats) -> String {
    let mut out = String::new();
    let n = |x: usize| thousands(x);

    let mut rows: Vec<Vec<String>> = s
        .datasets
        .iter()
        .map(|d| {
            vec![
                dataset_short_name(d.dataset_id).to_string(),
                n(d.relations),
                n(d.causal),
                n(d.non_causal),
                n(d.signal_bearing),
                n(d.directed),
            ]
        })
        .collect();
    if !s.datasets.is_empty() {
        rows.push(vec![
            "total".into(),
            n(s.relations),
            n(s.causal),
            n(s.non_causal),
            n(s.signal_bearing),
            n(s.datasets.iter().map(|d| d.directed).sum()),
        ]);
    }
    out.push_str(&table(&["dataset", "relations", "causal", "non-causal", "signal", "directed"], &rows));
    out.push('\n');

    let mut rows: Vec<Vec<String>> = s
        .datasets
        .iter()
        .filter(|d| d.splits.iter().any(|&c| c > 0))
        .map(|d| {
            let mut row = vec![dataset_short_name(d.dataset_id).to_string()];
            row.extend(d.splits.iter().map(|&c| n(c)));
            row
        })
        .collect();
    if !rows.is_empty() {
        let mut total = vec!["total".to_string()];
        total.extend(s.splits.iter().map(|&c| n(c)));
        rows.push(total);
    }
    out.push_str(&table(&["split", "train", "dev", "test"], &rows));
    out.push('\n');

    let _ = writeln!(out, "unassigned: {}", n(s.unassigned));
    let _ = writeln!(out, "inter-sentence: {}", n(s.inter_sentence));
    let _ = writeln!(
        out,
        "direction: {} forward (0), {} backward (1)",
        n(s.direction.forward),
        n(s.direction.backward)
    );
    let hist: Vec<String> = s.span_lengths.iter().map(|(k, v)| format!("{k}:{}", n(*v))).collect();
    let _ = writeln!(out, "span length (tokens): {}", if hist.is_empty() { "-".into() } else { hist.join(" ") });
    out
}

pub fn render_report(stats: &CorpusStats, format: ReportFormat) -> String {
    match format {
        ReportFormat::Text => render_text(stats),
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(stats).expect("stats serialize");
            s.push('\n');
            s
        }
    }
}
