//! Projection of raw source text plus char ranges onto a normalized context.
//!
//! Adapters locate arguments in the raw document (or a window of it), then
//! hand the window and the argument fragments here. Each fragment is split
//! into whitespace tokens, the window is normalized under the corpus policy,
//! and every token boundary is carried through the normalization.

use unicode_normalization::UnicodeNormalization;

use crate::model::TokenSpan;
use crate::text::{whitespace_tokens, NormalizationPolicy};

/// A normalized context and the spans projected onto it, in input order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Projected {
    pub context: String,
    pub spans: Vec<TokenSpan>,
}

/// `raw`: the context before normalization. `spans`: one entry per span,
/// each a sorted list of char ranges into `raw`. Fragments are tokenized on
/// whitespace; an empty list yields an empty span.
pub fn project(raw: &str, spans: &[Vec<(usize, usize)>], policy: NormalizationPolicy) -> Projected {
    let token_ranges: Vec<Vec<(usize, usize)>> = spans
        .iter()
        .map(|frags| {
            frags
                .iter()
                .flat_map(|&(s, e)| whitespace_tokens(raw, s, e))
                .collect()
        })
        .collect();

    let (context, map) = match policy {
        NormalizationPolicy::None => {
            let n = raw.chars().count();
            (raw.to_string(), (0..=n).collect::<Vec<_>>())
        }
        NormalizationPolicy::NfcCollapse => {
            let (collapsed, collapse_map) = collapse_with_map(raw);
            let mut boundaries: Vec<usize> = token_ranges
                .iter()
                .flatten()
                .flat_map(|&(s, e)| [collapse_map[s], collapse_map[e]])
                .collect();
            let (composed, nfc_map) = nfc_with_map(&collapsed, &mut boundaries);
            let map = collapse_map
                .iter()
                .map(|&c| nfc_map.get(&c).copied().unwrap_or(usize::MAX))
                .collect();
            (composed, map)
        }
    };

    let spans = token_ranges
        .iter()
        .map(|ranges| {
            let offsets: Vec<(usize, usize)> =
                ranges.iter().map(|&(s, e)| (map[s], map[e])).collect();
            TokenSpan::from_offsets(&context, offsets.clone())
                .unwrap_or_else(|| TokenSpan::new(Vec::new(), offsets))
        })
        .collect();

    Projected { context, spans }
}

/// Collapses whitespace (trimming both ends) and returns, for every raw char
/// position `0..=len`, the number of collapsed chars emitted before it.
fn collapse_with_map(raw: &str) -> (String, Vec<usize>) {
    let mut out = String::with_capacity(raw.len());
    let mut out_len = 0usize;
    let mut map = Vec::with_capacity(raw.len() + 1);
    let mut pending_space = false;
    for c in raw.chars() {
        if c.is_whitespace() {
            map.push(out_len);
            pending_space = out_len > 0;
        } else {
            if pending_space {
                out.push(' ');
                out_len += 1;
                pending_space = false;
            }
            map.push(out_len);
            out.push(c);
            out_len += 1;
        }
    }
    map.push(out_len);
    (out, map)
}

/// NFC-normalizes `text` segment by segment between the given char
/// boundaries, returning the composed text and a map from each boundary to
/// its position in the composed text.
fn nfc_with_map(
    text: &str,
    boundaries: &mut Vec<usize>,
) -> (String, std::collections::HashMap<usize, usize>) {
    let chars: Vec<char> = text.chars().collect();
    boundaries.push(0);
    boundaries.push(chars.len());
    boundaries.sort_unstable();
    boundaries.dedup();

    let mut out = String::with_capacity(text.len());
    let mut map = std::collections::HashMap::new();
    let mut out_len = 0usize;
    map.insert(0, 0);
    for pair in boundaries.windows(2) {
        let segment: String = chars[pair[0]..pair[1]].iter().collect();
        for c in segment.nfc() {
            out.push(c);
            out_len += 1;
        }
        map.insert(pair[1], out_len);
    }
    (out, map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_relation;
    use crate::model::CrestRelation;

    fn rel_from(p: &Projected) -> CrestRelation {
        CrestRelation {
            original_id: "x".into(),
            dataset_id: 1,
            span1: p.spans[0].clone(),
            span2: p.spans[1].clone(),
            signal: p.spans.get(2).cloned().unwrap_or_default(),
            context: p.context.clone(),
            label: 1,
            direction: 0,
            split: -1,
        }
    }

    #[test]
    fn identity_policy_keeps_offsets() {
        let raw = "The cow  produced the milk.";
        let p = project(raw, &[vec![(4, 7)], vec![(22, 27)]], NormalizationPolicy::None);
        assert_eq!(p.context, raw);
        assert_eq!(p.spans[0].offsets, vec![(4, 7)]);
        assert_eq!(p.spans[1].tokens, vec!["milk."]);
    }

    #[test]
    fn collapse_shifts_offsets() {
        let raw = "  The cow\n\n produced   the milk.  ";
        let cow = raw.find("cow").unwrap();
        let milk = raw.find("milk").unwrap();
        let p = project(
            raw,
            &[vec![(cow, cow + 3)], vec![(milk, milk + 4)]],
            NormalizationPolicy::NfcCollapse,
        );
        assert_eq!(p.context, "The cow produced the milk.");
        assert_eq!(p.spans[0].offsets, vec![(4, 7)]);
        assert_eq!(p.spans[1].offsets, vec![(21, 25)]);
        assert!(validate_relation(&rel_from(&p), NormalizationPolicy::NfcCollapse).is_valid());
    }

    #[test]
    fn nfc_composition_shifts_offsets() {
        // "e" + combining acute composes into one char
        let raw = "cafe\u{301} latte after rain";
        let chars: Vec<char> = raw.chars().collect();
        let latte = 6;
        assert_eq!(chars[latte], 'l');
        let rain = chars.len() - 4;
        let p = project(
            raw,
            &[vec![(0, 5)], vec![(latte, latte + 5)], vec![(rain, rain + 4)]],
            NormalizationPolicy::NfcCollapse,
        );
        assert_eq!(p.context, "caf\u{e9} latte after rain");
        assert_eq!(p.spans[0].tokens, vec!["caf\u{e9}"]);
        assert_eq!(p.spans[1].offsets, vec![(5, 10)]);
        assert!(validate_relation(&rel_from(&p), NormalizationPolicy::NfcCollapse).is_valid());
    }

    #[test]
    fn multi_fragment_span() {
        let raw = "He not only ran but also hid.";
        let p = project(
            raw,
            &[vec![(3, 11), (20, 24)], vec![(25, 29)]],
            NormalizationPolicy::NfcCollapse,
        );
        assert_eq!(p.spans[0].tokens, vec!["not", "only", "also"]);
        assert_eq!(p.spans[0].offsets, vec![(3, 6), (7, 11), (20, 24)]);
        assert_eq!(p.spans[1].tokens, vec!["hid."]);
    }
}
