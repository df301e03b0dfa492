//! PDTB 3.0 pipe-delimited gold files.
//!
//! One relation per line, fields separated by `|`. Only these columns are
//! read (0-based):
//!
//! | col | content                                |
//! |-----|----------------------------------------|
//! | 0   | relation type (Explicit, Implicit, ...) |
//! | 1   | connective span list                   |
//! | 8   | sense 1 of connective 1                |
//! | 9   | sense 2 of connective 1                |
//! | 11  | sense 1 of connective 2                |
//! | 12  | sense 2 of connective 2                |
//! | 14  | Arg1 span list                         |
//! | 20  | Arg2 span list                         |
//!
//! Span lists look like `12..20;30..40` (char offsets into the raw text).
//! Gold files are either `name.pdtb` next to `name.txt`, or extensionless
//! files under a `gold/` directory mirrored by a `raw/` directory.
//!
//! The first `Contingency.Cause` sense decides: `Result` means Arg1 causes
//! Arg2 (direction 0), `Reason` means Arg2 causes Arg1 (direction 1).
//! `span1` is always Arg1. Connective spans become the signal; implicit
//! relations have none. Everything else is skipped as EXCLUDED_SENSE.

use std::path::{Path, PathBuf};

use super::{file_stem, read_source, Draft, ParseOutput, SkipReason};
use crate::error::Result;
use crate::model::{DIRECTION_BACKWARD, DIRECTION_FORWARD, LABEL_CAUSAL};
use crate::text::{CharIndex, NormalizationPolicy};

const COL_TYPE: usize = 0;
const COL_CONN: usize = 1;
const SENSE_COLS: [usize; 4] = [8, 9, 11, 12];
const COL_ARG1: usize = 14;
const COL_ARG2: usize = 20;

fn in_gold_dir(path: &Path) -> bool {
    path.ancestors()
        .skip(1)
        .any(|a| a.file_name().is_some_and(|n| n == "gold"))
}

pub(crate) fn is_record_file(path: &Path) -> bool {
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) => ext.eq_ignore_ascii_case("pdtb"),
        None => in_gold_dir(path),
    }
}

/// Raw text file belonging to a gold file.
pub fn paired_raw(path: &Path) -> PathBuf {
    if path.extension().is_some() {
        return path.with_extension("txt");
    }
    let mut out = PathBuf::new();
    let mut swapped = false;
    let parts: Vec<_> = path.components().collect();
    // replace the innermost `gold` directory
    let last_gold = parts.iter().rposition(|c| c.as_os_str() == "gold");
    for (i, c) in parts.iter().enumerate() {
        if Some(i) == last_gold && !swapped {
            out.push("raw");
            swapped = true;
        } else {
            out.push(c.as_os_str());
        }
    }
    out
}

pub(crate) fn parse_file(path: &Path, policy: NormalizationPolicy) -> Result<ParseOutput> {
    let records = read_source(path)?;
    let raw_path = paired_raw(path);
    let raw = if raw_path.exists() {
        Some(read_source(&raw_path)?)
    } else {
        None
    };
    Ok(parse_str(&records, raw.as_deref(), &file_stem(path), policy))
}

/// Parses `12..20;30..40`. An empty field gives an empty list.
fn span_list(field: &str) -> Option<Vec<(usize, usize)>> {
    let field = field.trim();
    if field.is_empty() {
        return Some(Vec::new());
    }
    let mut out = Vec::new();
    for part in field.split(';') {
        let (s, e) = part.trim().split_once("..")?;
        let (s, e): (usize, usize) = (s.trim().parse().ok()?, e.trim().parse().ok()?);
        if s >= e {
            return None;
        }
        out.push((s, e));
    }
    out.sort();
    Some(out)
}

/// Direction from the first causal sense, or the reason the line is excluded.
fn causal_direction(cols: &[&str]) -> std::result::Result<i32, String> {
    let senses: Vec<&str> = SENSE_COLS
        .iter()
        .filter_map(|&c| cols.get(c).map(|s| s.trim()))
        .filter(|s| !s.is_empty())
        .collect();
    let Some(sense) = senses.iter().find(|s| s.starts_with("Contingency.Cause")) else {
        return Err(if senses.is_empty() {
            "no sense".to_string()
        } else {
            format!("senses {}", senses.join(", "))
        });
    };
    let leaf = sense.rsplit('.').next().unwrap_or("");
    let leaf = leaf.trim_end_matches("+Belief").trim_end_matches("+SpeechAct");
    match leaf {
        "Result" => Ok(DIRECTION_FORWARD),
        "Reason" => Ok(DIRECTION_BACKWARD),
        _ => Err(format!("sense {sense}")),
    }
}

/// `raw` is `None` when the raw text is unavailable; every line is then
/// skipped as MISSING_TEXT.
pub fn parse_str(records: &str, raw: Option<&str>, doc: &str, policy: NormalizationPolicy) -> ParseOutput {
    let mut out = ParseOutput::default();
    let index = raw.map(CharIndex::new);
    for (i, line) in records.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        out.candidates += 1;
        let original_id = format!("{doc}:{}", i + 1);
        let cols: Vec<&str> = line.split('|').collect();
        if cols.len() <= COL_ARG2 {
            out.skip(original_id, SkipReason::Malformed, format!("only {} columns", cols.len()));
            continue;
        }
        let direction = match causal_direction(&cols) {
            Ok(d) => d,
            Err(why) => {
                out.skip(original_id, SkipReason::ExcludedSense, why);
                continue;
            }
        };
        let (Some(raw), Some(index)) = (raw, index.as_ref()) else {
            out.skip(original_id, SkipReason::MissingText, "no raw text");
            continue;
        };
        let (Some(arg1), Some(arg2), Some(conn)) =
            (span_list(cols[COL_ARG1]), span_list(cols[COL_ARG2]), span_list(cols[COL_CONN]))
        else {
            out.skip(original_id, SkipReason::Malformed, "unreadable span list");
            continue;
        };
        if arg1.is_empty() || arg2.is_empty() {
            out.skip(original_id, SkipReason::Malformed, "empty argument");
            continue;
        }
        let explicit = matches!(cols[COL_TYPE].trim(), "Explicit" | "AltLex" | "AltLexC");
        if explicit && conn.is_empty() {
            out.skip(original_id, SkipReason::Malformed, "explicit relation without connective span");
            continue;
        }
        let signal = if explicit { conn } else { Vec::new() };
        if arg1.iter().chain(&arg2).chain(&signal).any(|r| r.1 > index.len()) {
            out.skip(original_id, SkipReason::Malformed, "span outside the raw text");
            continue;
        }
        match Draft::from_document(original_id.clone(), raw, arg1, arg2, signal, LABEL_CAUSAL, direction) {
            Some(draft) => out.push_draft(draft, super::PDTB3, policy),
            None => out.skip(original_id, SkipReason::Malformed, "could not cut a context window"),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: NormalizationPolicy = NormalizationPolicy::NfcCollapse;
    const RAW: &str = "The plant closed because demand fell. Workers protested. Then it rained.";

    fn line(kind: &str, conn: &str, sense: &str, arg1: &str, arg2: &str) -> String {
        let mut cols = vec![""; 27];
        cols[COL_TYPE] = kind;
        cols[COL_CONN] = conn;
        cols[8] = sense;
        cols[COL_ARG1] = arg1;
        cols[COL_ARG2] = arg2;
        cols.join("|")
    }

    #[test]
    fn explicit_reason() {
        let rec = line("Explicit", "17..24", "Contingency.Cause.Reason", "0..16", "25..36");
        let out = parse_str(&rec, Some(RAW), "wsj_0001", P);
        assert_eq!(out.relations.len(), 1, "{:?}", out.skips);
        let rel = &out.relations[0];
        assert_eq!(rel.original_id, "wsj_0001:1");
        assert_eq!(rel.context, "The plant closed because demand fell.");
        assert_eq!(rel.span1.tokens, vec!["The", "plant", "closed"]);
        assert_eq!(rel.span2.tokens, vec!["demand", "fell"]);
        assert_eq!(rel.signal.tokens, vec!["because"]);
        assert_eq!(rel.direction, 1);
    }

    #[test]
    fn implicit_result_has_no_signal() {
        let rec = line("Implicit", "", "Contingency.Cause.Result", "0..36", "38..55");
        let out = parse_str(&rec, Some(RAW), "d", P);
        let rel = &out.relations[0];
        assert!(rel.signal.is_empty());
        assert_eq!(rel.direction, 0);
        assert_eq!(rel.span2.tokens, vec!["Workers", "protested"]);
    }

    #[test]
    fn senses_and_conservation() {
        let recs = [
            line("Explicit", "57..61", "Temporal.Asynchronous.Precedence", "38..56", "62..71"),
            line("Implicit", "", "Contingency.Cause.NegResult", "0..36", "38..56"),
            line("EntRel", "", "", "0..36", "38..56"),
            line("Implicit", "", "Contingency.Cause+Belief.Result+Belief", "0..36", "38..56"),
            line("Explicit", "", "Contingency.Cause.Result", "0..36", "38..56"),
            "Implicit|broken".to_string(),
        ]
        .join("\n");
        let out = parse_str(&recs, Some(RAW), "d", P);
        assert_eq!(out.candidates, 6);
        assert_eq!(out.relations.len(), 1);
        let reasons: Vec<SkipReason> = out.skips.iter().map(|s| s.reason).collect();
        assert_eq!(
            reasons,
            vec![
                SkipReason::ExcludedSense,
                SkipReason::ExcludedSense,
                SkipReason::ExcludedSense,
                SkipReason::Malformed,
                SkipReason::Malformed
            ]
        );
        assert!(out.is_conserved());
    }

    #[test]
    fn secondary_sense_columns_are_consulted() {
        let mut cols = vec![""; 27];
        cols[COL_TYPE] = "Implicit";
        cols[8] = "Expansion.Conjunction";
        cols[11] = "Contingency.Cause.Result";
        cols[COL_ARG1] = "0..36";
        cols[COL_ARG2] = "38..56";
        let out = parse_str(&cols.join("|"), Some(RAW), "d", P);
        assert_eq!(out.relations.len(), 1);
    }

    #[test]
    fn missing_raw_text() {
        let rec = line("Implicit", "", "Contingency.Cause.Result", "0..36", "38..55");
        let out = parse_str(&rec, None, "d", P);
        assert_eq!(out.skips[0].reason, SkipReason::MissingText);
    }

    #[test]
    fn file_layouts() {
        assert!(is_record_file(Path::new("x/a.pdtb")));
        assert!(is_record_file(Path::new("pdtb/gold/00/wsj_0001")));
        assert!(!is_record_file(Path::new("pdtb/raw/00/wsj_0001")));
        assert!(!is_record_file(Path::new("x/a.txt")));
        assert_eq!(paired_raw(Path::new("x/a.pdtb")), PathBuf::from("x/a.txt"));
        assert_eq!(
            paired_raw(Path::new("pdtb/gold/00/wsj_0001")),
            PathBuf::from("pdtb/raw/00/wsj_0001")
        );
    }

    #[test]
    fn span_lists() {
        assert_eq!(span_list("30..40;12..20"), Some(vec![(12, 20), (30, 40)]));
        assert_eq!(span_list(""), Some(vec![]));
        assert_eq!(span_list("5..5"), None);
        assert_eq!(span_list("a..b"), None);
    }
}
