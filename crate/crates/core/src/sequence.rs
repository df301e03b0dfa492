//! Marker-token input sequences.
//!
//! Each span's full extent is wrapped in a pair of reserved marker tokens,
//! separated from the text by one space:
//!
//! ```text
//! ... full [unused1] flood [unused2] after the [unused3] deluge of rain [unused4] a ...
//! ```
//!
//! In the default direction-blind mode the markers follow span identity
//! (span1 always gets the span1 pair), so flipping a relation's direction
//! never changes the text. With `with_direction` the cause side gets the
//! span1 pair instead.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::write_jsonl;
use crate::model::{Corpus, CrestRelation, DIRECTION_BACKWARD, DIRECTION_FORWARD, SPLIT_DEV, SPLIT_TEST, SPLIT_TRAIN};
use crate::text::has_sentence_boundary;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MarkerScheme {
    pub span1_open: String,
    pub span1_close: String,
    pub span2_open: String,
    pub span2_close: String,
    pub signal_open: Option<String>,
    pub signal_close: Option<String>,
    pub mark_signal: bool,
}

impl Default for MarkerScheme {
    fn default() -> Self {
        MarkerScheme {
            span1_open: "[unused1]".into(),
            span1_close: "[unused2]".into(),
            span2_open: "[unused3]".into(),
            span2_close: "[unused4]".into(),
            signal_open: Some("[unused5]".into()),
            signal_close: Some("[unused6]".into()),
            mark_signal: false,
        }
    }
}

impl MarkerScheme {
    /// Every configured marker, active or not.
    pub fn all_markers(&self) -> Vec<&str> {
        let mut out = vec![
            self.span1_open.as_str(),
            self.span1_close.as_str(),
            self.span2_open.as_str(),
            self.span2_close.as_str(),
        ];
        out.extend(self.signal_open.as_deref());
        out.extend(self.signal_close.as_deref());
        out
    }

    fn signal_pair(&self) -> Option<(&str, &str)> {
        if !self.mark_signal {
            return None;
        }
        Some((self.signal_open.as_deref()?, self.signal_close.as_deref()?))
    }

    pub fn check(&self) -> Result<()> {
        let markers = self.all_markers();
        if let Some(bad) = markers.iter().find(|m| m.is_empty() || m.chars().any(char::is_whitespace)) {
            return Err(Error::BadMarkers(format!("marker {bad:?} is empty or contains whitespace")));
        }
        for (i, a) in markers.iter().enumerate() {
            if markers[i + 1..].contains(a) {
                return Err(Error::BadMarkers(format!("marker {a:?} is used twice")));
            }
        }
        if self.mark_signal && self.signal_pair().is_none() {
            return Err(Error::BadMarkers("mark_signal needs signal_open and signal_close".into()));
        }
        Ok(())
    }

    /// The first marker found inside `context`, if any.
    pub fn collision<'a>(&'a self, context: &str) -> Option<&'a str> {
        self.all_markers().into_iter().find(|m| context.contains(m))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    /// Target is `direction`; causal relations only.
    #[default]
    Direction,
    /// Target is `label`.
    Pair,
}

impl Task {
    pub fn as_str(self) -> &'static str {
        match self {
            Task::Direction => "direction",
            Task::Pair => "pair",
        }
    }

    pub fn accepts(self, rel: &CrestRelation) -> bool {
        match self {
            Task::Direction => rel.is_causal(),
            Task::Pair => true,
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "direction" => Ok(Task::Direction),
            "pair" => Ok(Task::Pair),
            other => Err(format!("unknown task `{other}` (expected direction or pair)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkedSequence {
    pub text: String,
    pub target: i32,
    pub task: Task,
    pub original_id: String,
    pub dataset_id: u32,
    pub inter_sentence: bool,
}

/// One line of a task file. Field order is part of the format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskLine {
    pub text: String,
    pub target: i32,
    pub original_id: String,
    pub dataset_id: u32,
    pub inter_sentence: bool,
}

impl From<MarkedSequence> for TaskLine {
    fn from(s: MarkedSequence) -> Self {
        TaskLine {
            text: s.text,
            target: s.target,
            original_id: s.original_id,
            dataset_id: s.dataset_id,
            inter_sentence: s.inter_sentence,
        }
    }
}

/// True when a sentence boundary lies between the two span extents.
pub fn is_inter_sentence(rel: &CrestRelation) -> bool {
    let (Some(a), Some(b)) = (rel.span1.extent(), rel.span2.extent()) else {
        return false;
    };
    let (first, second) = if a.0 <= b.0 { (a, b) } else { (b, a) };
    first.1 < second.0 && has_sentence_boundary(&rel.context, first.1, second.0)
}

fn target_for(rel: &CrestRelation, task: Task) -> std::result::Result<i32, String> {
    match task {
        Task::Pair => Ok(rel.label),
        Task::Direction if !rel.is_causal() => Err("direction task needs a causal relation (label 1)".into()),
        Task::Direction => match rel.direction {
            DIRECTION_FORWARD | DIRECTION_BACKWARD => Ok(rel.direction),
            d => Err(format!("direction task needs direction 0 or 1, got {d}")),
        },
    }
}

struct Bracket<'a> {
    start: usize,
    end: usize,
    open: &'a str,
    close: &'a str,
}

fn nested_or_disjoint(a: &Bracket<'_>, b: &Bracket<'_>) -> bool {
    a.end <= b.start || b.end <= a.start || (a.start <= b.start && b.end <= a.end) || (b.start <= a.start && a.end <= b.end)
}

/// Inserts `open ` before and ` close` after every bracket extent.
fn insert_markers(context: &str, brackets: &[Bracket<'_>]) -> String {
    // (position, rank, insertion); at one position closes precede opens,
    // inner closes precede outer closes and outer opens precede inner opens.
    // Equal extents nest in bracket order.
    let mut events: Vec<(usize, (u8, isize, isize), String)> = Vec::with_capacity(brackets.len() * 2);
    for (k, b) in brackets.iter().enumerate() {
        let width = (b.end - b.start) as isize;
        let k = k as isize;
        events.push((b.start, (1, -width, k), format!("{} ", b.open)));
        events.push((b.end, (0, width, -k), format!(" {}", b.close)));
    }
    events.sort_by_key(|x| (x.0, x.1));
    let mut out = String::with_capacity(context.len() + events.iter().map(|e| e.2.len()).sum::<usize>());
    let mut events = events.into_iter().peekable();
    for (i, c) in context.chars().enumerate() {
        while let Some(e) = events.next_if(|e| e.0 == i) {
            out.push_str(&e.2);
        }
        out.push(c);
    }
    for e in events {
        out.push_str(&e.2);
    }
    out
}

/// Builds the marked sequence for one relation.
pub fn to_sequence(rel: &CrestRelation, scheme: &MarkerScheme, with_direction: bool, task: Task) -> Result<MarkedSequence> {
    let fail = |message: String| Error::Sequence {
        original_id: rel.original_id.clone(),
        message,
    };
    scheme.check()?;
    let target = target_for(rel, task).map_err(fail)?;
    if let Some(m) = scheme.collision(&rel.context) {
        return Err(fail(format!("marker {m:?} occurs in the context")));
    }
    let (Some(e1), Some(e2)) = (rel.span1.extent(), rel.span2.extent()) else {
        return Err(fail("span1 and span2 must be non-empty".into()));
    };
    if !(e1.1 <= e2.0 || e2.1 <= e1.0) {
        return Err(fail("span1 and span2 overlap".into()));
    }
    let swap = with_direction && rel.is_causal() && rel.direction == DIRECTION_BACKWARD;
    let (first_pair, second_pair) = (
        (scheme.span1_open.as_str(), scheme.span1_close.as_str()),
        (scheme.span2_open.as_str(), scheme.span2_close.as_str()),
    );
    let (m1, m2) = if swap { (second_pair, first_pair) } else { (first_pair, second_pair) };
    let mut brackets = vec![
        Bracket { start: e1.0, end: e1.1, open: m1.0, close: m1.1 },
        Bracket { start: e2.0, end: e2.1, open: m2.0, close: m2.1 },
    ];
    if let (Some((open, close)), Some(es)) = (scheme.signal_pair(), rel.signal.extent()) {
        let sig = Bracket { start: es.0, end: es.1, open, close };
        if !brackets.iter().all(|b| nested_or_disjoint(b, &sig)) {
            return Err(fail("signal extent partially overlaps a span".into()));
        }
        brackets.push(sig);
    }
    Ok(MarkedSequence {
        text: insert_markers(&rel.context, &brackets),
        target,
        task,
        original_id: rel.original_id.clone(),
        dataset_id: rel.dataset_id,
        inter_sentence: is_inter_sentence(rel),
    })
}

/// Removes every marker together with the space inserted next to it.
pub fn strip_markers(text: &str, scheme: &MarkerScheme) -> String {
    let mut out = text.to_string();
    let opens = [Some(&scheme.span1_open), Some(&scheme.span2_open), scheme.signal_open.as_ref()];
    let closes = [Some(&scheme.span1_close), Some(&scheme.span2_close), scheme.signal_close.as_ref()];
    for m in opens.into_iter().flatten() {
        out = out.replace(&format!("{m} "), "");
    }
    for m in closes.into_iter().flatten() {
        out = out.replace(&format!(" {m}"), "");
    }
    out
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskCounts {
    pub train: usize,
    pub dev: usize,
    pub test: usize,
}

impl TaskCounts {
    pub fn total(&self) -> usize {
        self.train + self.dev + self.test
    }
}

pub const TASK_FILES: [&str; 3] = ["train.jsonl", "dev.jsonl", "test.jsonl"];

/// Sequences for every relation the task accepts, grouped by split, in
/// corpus order.
pub fn build_task_dataset(
    corpus: &Corpus,
    task: Task,
    scheme: &MarkerScheme,
    with_direction: bool,
) -> Result<[Vec<TaskLine>; 3]> {
    scheme.check()?;
    let selected: Vec<&CrestRelation> = corpus.relations.iter().filter(|r| task.accepts(r)).collect();
    let unassigned = selected
        .iter()
        .filter(|r| !(SPLIT_TRAIN..=SPLIT_TEST).contains(&r.split))
        .count();
    if unassigned > 0 {
        return Err(Error::UnassignedSplit(unassigned));
    }
    let lines: Vec<(i32, TaskLine)> = selected
        .par_iter()
        .map(|r| to_sequence(r, scheme, with_direction, task).map(|s| (r.split, TaskLine::from(s))))
        .collect::<Result<_>>()?;
    let mut out: [Vec<TaskLine>; 3] = Default::default();
    for (split, line) in lines {
        out[split as usize].push(line);
    }
    Ok(out)
}

/// Writes `train.jsonl`, `dev.jsonl` and `test.jsonl` into `out_dir`.
pub fn emit_task_dataset(
    corpus: &Corpus,
    task: Task,
    scheme: &MarkerScheme,
    with_direction: bool,
    out_dir: &Path,
) -> Result<TaskCounts> {
    let splits = build_task_dataset(corpus, task, scheme, with_direction)?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    for (name, rows) in TASK_FILES.iter().zip(&splits) {
        write_jsonl(&out_dir.join(name), rows)?;
    }
    let counts = TaskCounts {
        train: splits[SPLIT_TRAIN as usize].len(),
        dev: splits[SPLIT_DEV as usize].len(),
        test: splits[SPLIT_TEST as usize].len(),
    };
    if counts.total() == 0 {
        log::warn!("{task} task: no relations selected; wrote three empty files");
    }
    log::info!("{task} task: {} train, {} dev, {} test", counts.train, counts.dev, counts.test);
    Ok(counts)
}
