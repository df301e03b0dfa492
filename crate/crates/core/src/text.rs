//! Character-indexed text helpers shared by the schema, the adapters and
//! the sequence builder.
//!
//! All offsets in this crate count Unicode scalar values (Rust `char`s),
//! never bytes.

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

/// How a corpus normalizes its contexts before character indices are taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum NormalizationPolicy {
    #[serde(rename = "none")]
    None,
    /// NFC, then every whitespace run becomes one ASCII space and the ends are trimmed.
    #[default]
    #[serde(rename = "nfc+collapse-whitespace")]
    NfcCollapse,
}

impl NormalizationPolicy {
    pub fn apply(self, text: &str) -> String {
        match self {
            NormalizationPolicy::None => text.to_string(),
            NormalizationPolicy::NfcCollapse => collapse_whitespace(&text.nfc().collect::<String>()),
        }
    }

    pub fn is_normalized(self, text: &str) -> bool {
        match self {
            NormalizationPolicy::None => true,
            NormalizationPolicy::NfcCollapse => self.apply(text) == text,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            NormalizationPolicy::None => "none",
            NormalizationPolicy::NfcCollapse => "nfc+collapse-whitespace",
        }
    }
}

impl std::str::FromStr for NormalizationPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(NormalizationPolicy::None),
            "nfc+collapse-whitespace" | "nfc" => Ok(NormalizationPolicy::NfcCollapse),
            other => Err(format!("unknown normalization policy `{other}`")),
        }
    }
}

/// Collapses whitespace runs to a single space and trims both ends.
pub fn collapse_whitespace(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for word in text.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

/// Byte positions of every char boundary of a string, so that char-indexed
/// ranges can be sliced in O(1).
#[derive(Debug, Clone)]
pub struct CharIndex<'a> {
    text: &'a str,
    bounds: Vec<usize>,
}

impl<'a> CharIndex<'a> {
    pub fn new(text: &'a str) -> Self {
        let mut bounds: Vec<usize> = text.char_indices().map(|(b, _)| b).collect();
        bounds.push(text.len());
        CharIndex { text, bounds }
    }

    /// Number of chars.
    pub fn len(&self) -> usize {
        self.bounds.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn slice(&self, start: usize, end: usize) -> Option<&'a str> {
        if start > end || end > self.len() {
            return None;
        }
        Some(&self.text[self.bounds[start]..self.bounds[end]])
    }

    pub fn byte_offset(&self, char_pos: usize) -> Option<usize> {
        self.bounds.get(char_pos).copied()
    }
}

pub fn char_len(text: &str) -> usize {
    text.chars().count()
}

/// Splits the char range `[start, end)` of `text` into whitespace-separated
/// tokens, returning their char ranges.
pub fn whitespace_tokens(text: &str, start: usize, end: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut tok_start: Option<usize> = None;
    for (i, c) in text.chars().enumerate().skip(start).take(end.saturating_sub(start)) {
        match (c.is_whitespace(), tok_start) {
            (true, Some(s)) => {
                out.push((s, i));
                tok_start = None;
            }
            (false, None) => tok_start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = tok_start {
        out.push((s, end));
    }
    out
}

/// True when `chars[i]` ends a sentence: terminal punctuation, then at least
/// one whitespace char, then an uppercase letter.
fn is_sentence_end(chars: &[char], i: usize) -> bool {
    if !matches!(chars[i], '.' | '!' | '?') {
        return false;
    }
    let mut j = i + 1;
    if j >= chars.len() || !chars[j].is_whitespace() {
        return false;
    }
    while j < chars.len() && chars[j].is_whitespace() {
        j += 1;
    }
    j < chars.len() && chars[j].is_uppercase()
}

/// True if a sentence boundary lies strictly inside the char range
/// `[gap_start, gap_end)`: the terminal punctuation sits at or after
/// `gap_start` and the next sentence's first letter before `gap_end`.
pub fn has_sentence_boundary(text: &str, gap_start: usize, gap_end: usize) -> bool {
    let chars: Vec<char> = text.chars().collect();
    let gap_end = gap_end.min(chars.len());
    (gap_start..gap_end).any(|i| {
        if !is_sentence_end(&chars, i) {
            return false;
        }
        let next = (i + 1..chars.len()).find(|&j| !chars[j].is_whitespace());
        matches!(next, Some(j) if j < gap_end)
    })
}

/// Smallest window of whole sentences (by the terminal-punctuation
/// heuristic, with blank lines also ending a sentence) that covers the char
/// range `[start, end)`.
pub fn sentence_window(text: &str, start: usize, end: usize) -> (usize, usize) {
    let chars: Vec<char> = text.chars().collect();
    let n = chars.len();
    let start = start.min(n);
    let end = end.clamp(start, n);

    let paragraph_break = |i: usize| chars[i] == '\n' && i + 1 < n && chars[i + 1] == '\n';

    let mut lo = 0;
    for i in (0..start).rev() {
        if is_sentence_end(&chars, i) {
            lo = i + 1;
            break;
        }
        if i + 1 < start && paragraph_break(i) {
            lo = i + 2;
            break;
        }
    }
    while lo < start && chars[lo].is_whitespace() {
        lo += 1;
    }

    let mut hi = n;
    for i in end.saturating_sub(1).max(start)..n {
        if i >= end && paragraph_break(i) {
            hi = i;
            break;
        }
        if is_sentence_end(&chars, i) {
            hi = i + 1;
            break;
        }
    }
    while hi > end && chars[hi - 1].is_whitespace() {
        hi -= 1;
    }
    (lo, hi)
}
