//! SemEval-2007 task 4 and SemEval-2010 task 8.
//!
//! Both use one record per sentence:
//!
//! ```text
//! 8\t"The <e1>cow</e1> produced the <e2>milk</e2>."
//! Cause-Effect(e1,e2)
//! Comment: optional
//! ```
//!
//! The 2007 relation line carries a truth value instead, e.g.
//! `WordNet(e1) = "n1", WordNet(e2) = "n2", Cause-Effect(e2,e1) = "true"`.
//! Records are separated by blank lines. Tags are stripped from the
//! sentence to form the context.

use std::path::Path;

use super::{file_stem, read_source, Draft, ParseOutput, SkipReason};
use crate::error::Result;
use crate::model::{
    DIRECTION_BACKWARD, DIRECTION_FORWARD, DIRECTION_UNDEFINED, LABEL_CAUSAL, LABEL_NON_CAUSAL,
};
use crate::text::NormalizationPolicy;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Y2007,
    Y2010,
}

pub(crate) fn parse_file_2007(path: &Path, policy: NormalizationPolicy) -> Result<ParseOutput> {
    Ok(parse_str(&read_source(path)?, &file_stem(path), Task::Y2007, policy))
}

pub(crate) fn parse_file_2010(path: &Path, policy: NormalizationPolicy) -> Result<ParseOutput> {
    Ok(parse_str(&read_source(path)?, &file_stem(path), Task::Y2010, policy))
}

/// `(id, quoted sentence)` if the line is a sentence line.
fn sentence_line(line: &str) -> Option<(&str, &str)> {
    let line = line.trim();
    let digits = line.find(|c: char| !c.is_ascii_digit())?;
    if digits == 0 {
        return None;
    }
    let (id, rest) = line.split_at(digits);
    let rest = rest.trim_start();
    let body = rest.strip_prefix('"')?.strip_suffix('"')?;
    Some((id, body))
}

/// Context with tags stripped and the char ranges of `<e1>` and `<e2>`.
#[derive(Debug, PartialEq, Eq)]
pub struct Tagged {
    pub context: String,
    pub e1: (usize, usize),
    pub e2: (usize, usize),
}

/// Strips the inline entity tags. Each of the four tags must appear exactly
/// once, opening before closing, and the two entities must not nest.
pub fn strip_tags(sentence: &str) -> std::result::Result<Tagged, String> {
    const TAGS: [&str; 4] = ["<e1>", "</e1>", "<e2>", "</e2>"];
    let mut context = String::with_capacity(sentence.len());
    let mut pos = [None; 4];
    let mut chars = 0usize;
    let mut rest = sentence;
    while !rest.is_empty() {
        if let Some(t) = TAGS.iter().position(|t| rest.starts_with(t)) {
            if pos[t].is_some() {
                return Err(format!("tag {} appears twice", TAGS[t]));
            }
            pos[t] = Some(chars);
            rest = &rest[TAGS[t].len()..];
            continue;
        }
        let c = rest.chars().next().expect("non-empty");
        context.push(c);
        chars += 1;
        rest = &rest[c.len_utf8()..];
    }
    let get = |i: usize| pos[i].ok_or_else(|| format!("missing tag {}", TAGS[i]));
    let e1 = (get(0)?, get(1)?);
    let e2 = (get(2)?, get(3)?);
    for (name, (s, e)) in [("e1", e1), ("e2", e2)] {
        if s >= e {
            return Err(format!("entity {name} is empty or closed before opened"));
        }
    }
    if !(e1.1 <= e2.0 || e2.1 <= e1.0) {
        return Err("entity tags are nested or interleaved".into());
    }
    Ok(Tagged { context, e1, e2 })
}

#[derive(Debug, PartialEq, Eq)]
struct RelationLine {
    name: String,
    /// true for `(e1,e2)`, false for `(e2,e1)`, None when no argument order is given.
    e1_first: Option<bool>,
    /// 2007 truth value.
    truth: Option<bool>,
}

fn parse_relation_line(line: &str) -> Option<RelationLine> {
    let line = line.trim();
    for (pattern, e1_first) in [("(e1,e2)", true), ("(e2,e1)", false)] {
        if let Some(at) = line.find(pattern) {
            let head = &line[..at];
            let name_start = head
                .rfind(|c: char| c == ',' || c.is_whitespace())
                .map_or(0, |i| i + 1);
            let name = head[name_start..].to_string();
            if name.is_empty() {
                return None;
            }
            let tail = line[at + pattern.len()..].trim_start();
            let truth = tail.strip_prefix('=').map(|v| {
                v.trim_start()
                    .trim_start_matches('"')
                    .to_ascii_lowercase()
                    .starts_with("true")
            });
            return Some(RelationLine {
                name,
                e1_first: Some(e1_first),
                truth,
            });
        }
    }
    // 2010 "Other" carries no argument order
    if !line.is_empty() && line.chars().all(|c| c.is_alphanumeric() || c == '-' || c == '_') {
        return Some(RelationLine {
            name: line.to_string(),
            e1_first: None,
            truth: None,
        });
    }
    None
}

pub fn parse_str(text: &str, doc: &str, task: Task, policy: NormalizationPolicy) -> ParseOutput {
    let mut out = ParseOutput::default();
    let lines: Vec<&str> = text.lines().collect();
    let mut i = 0;
    while i < lines.len() {
        let Some((id, sentence)) = sentence_line(lines[i]) else {
            i += 1;
            continue;
        };
        out.candidates += 1;
        let original_id = format!("{doc}:{id}");
        i += 1;
        let relation_line = lines
            .get(i)
            .filter(|l| !l.trim().is_empty() && sentence_line(l).is_none());
        if relation_line.is_some() {
            i += 1;
        }

        let tagged = match strip_tags(sentence) {
            Ok(t) => t,
            Err(msg) => {
                out.skip(original_id, SkipReason::Malformed, msg);
                continue;
            }
        };
        let Some(rel) = relation_line.and_then(|l| parse_relation_line(l)) else {
            out.skip(original_id, SkipReason::Malformed, "missing or unreadable relation line");
            continue;
        };
        if task == Task::Y2007 && rel.truth.is_none() {
            out.skip(original_id, SkipReason::Malformed, "2007 relation line without truth value");
            continue;
        }

        let causal = rel.name.eq_ignore_ascii_case("Cause-Effect") && rel.truth.unwrap_or(true);
        let (label, direction) = match (causal, rel.e1_first) {
            (true, Some(true)) => (LABEL_CAUSAL, DIRECTION_FORWARD),
            (true, Some(false)) => (LABEL_CAUSAL, DIRECTION_BACKWARD),
            (true, None) => {
                out.skip(original_id, SkipReason::Malformed, "Cause-Effect without argument order");
                continue;
            }
            (false, _) => (LABEL_NON_CAUSAL, DIRECTION_UNDEFINED),
        };
        out.push_draft(
            Draft {
                original_id,
                raw_context: tagged.context,
                span1: vec![tagged.e1],
                span2: vec![tagged.e2],
                signal: Vec::new(),
                label,
                direction,
            },
            match task {
                Task::Y2007 => super::SEMEVAL_2007,
                Task::Y2010 => super::SEMEVAL_2010,
            },
            policy,
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: NormalizationPolicy = NormalizationPolicy::NfcCollapse;

    #[test]
    fn cow_milk_forward() {
        let text = "1\t\"The <e1>cow</e1> produced the <e2>milk</e2>.\"\nCause-Effect(e1,e2)\nComment:\n";
        let out = parse_str(text, "t", Task::Y2010, P);
        assert_eq!(out.candidates, 1);
        let rel = &out.relations[0];
        assert_eq!(rel.context, "The cow produced the milk.");
        assert_eq!(rel.span1.tokens, vec!["cow"]);
        assert_eq!(rel.span1.offsets, vec![(4, 7)]);
        assert_eq!(rel.span2.tokens, vec!["milk"]);
        assert_eq!(rel.span2.offsets, vec![(21, 25)]);
        assert_eq!((rel.label, rel.direction), (1, 0));
        assert!(rel.signal.is_empty());
        assert_eq!(rel.dataset_id, SEMEVAL_2010_ID);
    }

    const SEMEVAL_2010_ID: u32 = super::super::SEMEVAL_2010;

    #[test]
    fn reversed_and_other_relations() {
        let text = "1\t\"The <e1>cow</e1> produced the <e2>milk</e2>.\"\nCause-Effect(e2,e1)\n\n\
                    2\t\"The <e1>cow</e1> produced the <e2>milk</e2>.\"\nComponent-Whole(e1,e2)\n\n\
                    3\t\"A <e1>dog</e1> and a <e2>cat</e2>.\"\nOther\n";
        let out = parse_str(text, "t", Task::Y2010, P);
        let got: Vec<(i32, i32)> = out.relations.iter().map(|r| (r.label, r.direction)).collect();
        assert_eq!(got, vec![(1, 1), (0, -1), (0, -1)]);
        assert!(out.is_conserved());
    }

    #[test]
    fn unclosed_tag_is_malformed() {
        let text = "5\t\"The <e1>cow produced the <e2>milk</e2>.\"\nCause-Effect(e1,e2)\n";
        let out = parse_str(text, "t", Task::Y2010, P);
        assert!(out.relations.is_empty());
        assert_eq!(out.skips[0].reason, SkipReason::Malformed);
        assert_eq!(out.skips[0].original_id, "t:5");
    }

    #[test]
    fn nested_tags_are_malformed() {
        assert!(strip_tags("<e1>big <e2>cow</e2></e1> ate").is_err());
        assert!(strip_tags("<e1>a</e1> <e1>b</e1> <e2>c</e2>").is_err());
        assert!(strip_tags("<e1></e1> <e2>c</e2>").is_err());
    }

    #[test]
    fn semeval_2007_truth_values() {
        let text = "001 \"Heavy <e1>rain</e1> caused the <e2>flooding</e2>.\"\n\
                    WordNet(e1) = \"n1\", WordNet(e2) = \"n2\", Cause-Effect(e1,e2) = \"true\", Query = \"* caused *\"\n\n\
                    002 \"The <e1>flooding</e1> followed the <e2>rain</e2>.\"\n\
                    WordNet(e1) = \"n1\", WordNet(e2) = \"n2\", Cause-Effect(e2,e1) = \"false\"\n\n\
                    003 \"The <e1>flooding</e1> followed the <e2>rain</e2>.\"\n\
                    WordNet(e1) = \"n1\", WordNet(e2) = \"n2\", Cause-Effect(e2,e1) = \"true\"\n";
        let out = parse_str(text, "c", Task::Y2007, P);
        let got: Vec<(i32, i32)> = out.relations.iter().map(|r| (r.label, r.direction)).collect();
        assert_eq!(got, vec![(1, 0), (0, -1), (1, 1)]);
        assert_eq!(out.relations[0].dataset_id, super::super::SEMEVAL_2007);
    }

    #[test]
    fn missing_relation_line() {
        let text = "1\t\"The <e1>cow</e1> and <e2>milk</e2>.\"\n2\t\"A <e1>b</e1> c <e2>d</e2>.\"\nOther\n";
        let out = parse_str(text, "t", Task::Y2010, P);
        assert_eq!(out.candidates, 2);
        assert_eq!(out.relations.len(), 1);
        assert_eq!(out.skips.len(), 1);
    }

    #[test]
    fn empty_input() {
        let out = parse_str("", "t", Task::Y2010, P);
        assert_eq!(out, ParseOutput::default());
    }
}
