//! Choice of Plausible Alternatives.
//!
//! ```xml
//! <copa-corpus version="1.0">
//!   <item id="1" asks-for="cause" most-plausible-alternative="1">
//!     <p>My body cast a shadow over the grass.</p>
//!     <a1>The sun was rising.</a1>
//!     <a2>The grass was cut.</a2>
//!   </item>
//! </copa-corpus>
//! ```
//!
//! Every (premise, alternative) pair is a candidate: the more plausible one
//! becomes a causal relation, the other a non-causal one. The context is the
//! premise, one space, then the alternative.

use std::path::Path;

use super::{file_stem, read_source, source_error, Draft, ParseOutput, SkipReason};
use crate::error::Result;
use crate::model::{
    DIRECTION_BACKWARD, DIRECTION_FORWARD, DIRECTION_UNDEFINED, LABEL_CAUSAL, LABEL_NON_CAUSAL,
};
use crate::text::{char_len, NormalizationPolicy};

pub(crate) fn parse_file(path: &Path, policy: NormalizationPolicy) -> Result<ParseOutput> {
    let text = read_source(path)?;
    parse_str(&text, &file_stem(path), policy).map_err(|m| source_error(path, m))
}

fn alternative_index(name: &str) -> Option<usize> {
    name.strip_prefix('a')?.parse().ok()
}

pub fn parse_str(
    text: &str,
    doc: &str,
    policy: NormalizationPolicy,
) -> std::result::Result<ParseOutput, String> {
    let mut out = ParseOutput::default();
    if text.trim().is_empty() {
        return Ok(out);
    }
    let xml = roxmltree::Document::parse(text).map_err(|e| e.to_string())?;

    for item in xml.descendants().filter(|n| n.has_tag_name("item")) {
        let item_id = item.attribute("id").unwrap_or("?");
        let premise = item
            .children()
            .find(|n| n.has_tag_name("p"))
            .and_then(|n| n.text())
            .map(str::trim);
        let alternatives: Vec<(usize, &str)> = item
            .children()
            .filter(|n| n.is_element())
            .filter_map(|n| Some((alternative_index(n.tag_name().name())?, n.text().unwrap_or("").trim())))
            .collect();
        let pair_id = |k: usize| format!("{doc}:{item_id}:a{k}");
        out.candidates += alternatives.len().max(1);

        let asks_for = item.attribute("asks-for");
        let chosen: Option<usize> = item
            .attribute("most-plausible-alternative")
            .and_then(|v| v.trim().parse().ok());
        let problem = if alternatives.len() != 2 {
            Some(format!("expected 2 alternatives, found {}", alternatives.len()))
        } else if premise.is_none_or(str::is_empty) {
            Some("missing premise".to_string())
        } else if !matches!(asks_for, Some("cause") | Some("effect")) {
            Some(format!("bad asks-for {asks_for:?}"))
        } else if !chosen.is_some_and(|c| alternatives.iter().any(|(k, _)| *k == c)) {
            Some("most-plausible-alternative does not name an alternative".to_string())
        } else {
            None
        };
        if let Some(problem) = problem {
            if alternatives.is_empty() {
                out.skip(format!("{doc}:{item_id}"), SkipReason::Malformed, problem.clone());
            }
            for (k, _) in &alternatives {
                out.skip(pair_id(*k), SkipReason::Malformed, problem.clone());
            }
            continue;
        }
        let premise = premise.expect("checked above");
        let causal_direction = if asks_for == Some("cause") {
            DIRECTION_BACKWARD
        } else {
            DIRECTION_FORWARD
        };

        for (k, alt) in alternatives {
            let (label, direction) = if Some(k) == chosen {
                (LABEL_CAUSAL, causal_direction)
            } else {
                (LABEL_NON_CAUSAL, DIRECTION_UNDEFINED)
            };
            let p_len = char_len(premise);
            let raw_context = format!("{premise} {alt}");
            let total = char_len(&raw_context);
            out.push_draft(
                Draft {
                    original_id: pair_id(k),
                    raw_context,
                    span1: vec![(0, p_len)],
                    span2: vec![(p_len + 1, total)],
                    signal: Vec::new(),
                    label,
                    direction,
                },
                super::COPA,
                policy,
            );
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: NormalizationPolicy = NormalizationPolicy::NfcCollapse;

    fn item(id: u32, asks: &str, most: u32) -> String {
        format!(
            "<item id=\"{id}\" asks-for=\"{asks}\" most-plausible-alternative=\"{most}\">\
             <p>The premise {id} happened.</p><a1>Alternative one {id}.</a1><a2>Alternative two {id}.</a2></item>"
        )
    }

    fn corpus(items: &[String]) -> String {
        format!("<copa-corpus version=\"1.0\">{}</copa-corpus>", items.concat())
    }

    #[test]
    fn effect_item_yields_forward_causal_and_non_causal() {
        let out = parse_str(&corpus(&[item(1, "effect", 1)]), "copa", P).unwrap();
        assert_eq!(out.relations.len(), 2);
        let (a, b) = (&out.relations[0], &out.relations[1]);
        assert_eq!((a.label, a.direction), (1, 0));
        assert_eq!((b.label, b.direction), (0, -1));
        assert_eq!(a.context, "The premise 1 happened. Alternative one 1.");
        assert_eq!(a.span1.tokens, vec!["The", "premise", "1", "happened."]);
        assert_eq!(a.span2.tokens, vec!["Alternative", "one", "1."]);
        assert_eq!(b.span2.tokens, vec!["Alternative", "two", "1."]);
    }

    #[test]
    fn cause_item_yields_backward_direction() {
        let out = parse_str(&corpus(&[item(2, "cause", 2)]), "copa", P).unwrap();
        assert_eq!((out.relations[0].label, out.relations[0].direction), (0, -1));
        assert_eq!((out.relations[1].label, out.relations[1].direction), (1, 1));
    }

    #[test]
    fn thousand_items_give_thousand_causal() {
        let items: Vec<String> = (1..=1000)
            .map(|i| item(i, if i % 2 == 0 { "cause" } else { "effect" }, 1 + i % 2))
            .collect();
        let out = parse_str(&corpus(&items), "copa", P).unwrap();
        assert_eq!(out.relations.iter().filter(|r| r.label == 1).count(), 1000);
        assert_eq!(out.relations.len(), 2000);
        assert!(out.is_conserved());
    }

    #[test]
    fn three_alternatives_is_malformed() {
        let bad = "<copa-corpus><item id=\"9\" asks-for=\"cause\" most-plausible-alternative=\"1\">\
                   <p>P.</p><a1>A.</a1><a2>B.</a2><a3>C.</a3></item></copa-corpus>";
        let out = parse_str(bad, "copa", P).unwrap();
        assert!(out.relations.is_empty());
        assert_eq!(out.skips.len(), 3);
        assert!(out.skips.iter().all(|s| s.reason == SkipReason::Malformed));
        assert!(out.is_conserved());
    }

    #[test]
    fn empty_file() {
        assert_eq!(parse_str("", "copa", P).unwrap(), ParseOutput::default());
    }

    #[test]
    fn broken_xml_is_an_error() {
        assert!(parse_str("<copa-corpus><item>", "copa", P).is_err());
    }
}
