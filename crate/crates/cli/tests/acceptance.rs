//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Licensed corpus counts are checked only when `CREST_FORGE_LICENSED_DIR`
//! points at a directory with `pdtb3/`, `copa/` and `eventstoryline/`.

use std::collections::{HashMap, HashSet};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use crest_forge::adapters::{adapter_by_name, parse_with_adapter, SkipReason};
use crest_forge::io::corpus_to_string;
use crest_forge::sequence::strip_markers;
use crest_forge::splitter::{audit_splits, split_corpus};
use crest_forge::{
    to_sequence, validate_relation, Corpus, CrestRelation, IssueCode, MarkerScheme, NormalizationPolicy, OverlapMode,
    OverlapPolicy, SplitConfig, Task, TokenSpan,
};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const P: NormalizationPolicy = NormalizationPolicy::NfcCollapse;

// Pinned limits.
const MUTATION_LIMIT: Duration = Duration::from_secs(1);
const ADAPTER_LIMIT: Duration = Duration::from_secs(10);
const LEAKAGE_LIMIT: Duration = Duration::from_secs(30);
const BLINDNESS_LIMIT: Duration = Duration::from_secs(10);
const LEAKAGE_CORPUS: usize = 500;
const BLINDNESS_CASES: usize = 1000;
const MIN_MUTATIONS: usize = 12;
/// Relative tolerance for the licensed counts other than COPA.
const COUNT_TOLERANCE: f64 = 0.02;
const TARGET_RATIOS: [f64; 3] = [0.8, 0.1, 0.1];

type Outcome = Result<String, String>;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures")
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let out = f()?;
    let took = start.elapsed();
    if took > limit {
        return Err(format!("{out}; took {took:?}, limit {limit:?}"));
    }
    Ok(format!("{out}; {took:.2?}"))
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---- shared builders ----

const FLOOD: &str = "The river had now turned into full flood after the deluge of rain a few days ago.";

fn span(tokens: &[&str], offsets: &[(usize, usize)]) -> TokenSpan {
    TokenSpan::new(tokens.iter().map(|t| t.to_string()).collect(), offsets.to_vec())
}

fn flood() -> CrestRelation {
    CrestRelation {
        original_id: "flood".into(),
        dataset_id: 5,
        span1: span(&["flood"], &[(35, 40)]),
        span2: span(&["deluge", "of", "rain"], &[(51, 57), (58, 60), (61, 65)]),
        signal: span(&["after"], &[(41, 46)]),
        context: FLOOD.into(),
        label: 1,
        direction: 1,
        split: 0,
    }
}

/// Char offsets of every whitespace-separated word.
fn word_offsets(text: &str) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = None;
    let mut n = 0;
    for (i, c) in text.chars().enumerate() {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((s, i));
                start = None;
            }
            _ => {}
        }
        n = i + 1;
    }
    if let Some(s) = start {
        out.push((s, n));
    }
    out
}

fn slice(text: &str, (s, e): (usize, usize)) -> String {
    text.chars().skip(s).take(e - s).collect()
}

fn span_of(text: &str, words: &[(usize, usize)]) -> TokenSpan {
    TokenSpan::new(words.iter().map(|&w| slice(text, w)).collect(), words.to_vec())
}

// ---- criteria ----

fn mutation_suite() -> Outcome {
    type Mutation = (&'static str, fn(&mut CrestRelation), IssueCode);
    let mutations: Vec<Mutation> = vec![
        ("span1 truncated", |r| r.span1.offsets = vec![(35, 39)], IssueCode::OffsetMismatch),
        ("signal shifted", |r| r.signal.offsets = vec![(40, 45)], IssueCode::OffsetMismatch),
        ("span1 emptied", |r| r.span1 = TokenSpan::empty(), IssueCode::EmptySpan),
        ("span2 emptied", |r| r.span2 = TokenSpan::empty(), IssueCode::EmptySpan),
        ("label 2", |r| r.label = 2, IssueCode::BadLabel),
        ("label -1", |r| r.label = -1, IssueCode::BadLabel),
        ("direction 5", |r| r.direction = 5, IssueCode::BadDirection),
        ("direction -2", |r| r.direction = -2, IssueCode::BadDirection),
        ("causal without direction", |r| r.direction = -1, IssueCode::DirectionlessCausal),
        (
            "span2 over span1",
            |r| r.span2 = span(&["full", "flood"], &[(30, 34), (35, 40)]),
            IssueCode::SpanInterleave,
        ),
        (
            "span2 inside span1 extent",
            |r| r.span1 = span(&["flood", "after", "the", "deluge"], &[(35, 40), (41, 46), (47, 50), (51, 57)]),
            IssueCode::SpanInterleave,
        ),
        ("span2 end past context", |r| r.span2.offsets[2] = (61, 400), IssueCode::OffsetOutOfRange),
        ("signal start == end", |r| r.signal.offsets = vec![(41, 41)], IssueCode::OffsetOutOfRange),
        ("split 3", |r| r.split = 3, IssueCode::BadSplit),
        (
            "span2 token dropped",
            |r| r.span2.tokens.truncate(2),
            IssueCode::TokenCountMismatch,
        ),
        (
            "span2 offsets reversed",
            |r| r.span2 = span(&["rain", "of", "deluge"], &[(61, 65), (58, 60), (51, 57)]),
            IssueCode::OffsetOrder,
        ),
        ("context trailing space", |r| r.context.push(' '), IssueCode::ContextNotNormalized),
    ];
    check(mutations.len() >= MIN_MUTATIONS, || format!("only {} mutations", mutations.len()))?;
    let base = validate_relation(&flood(), P);
    check(base.is_valid(), || format!("base record invalid: {base}"))?;
    let mut failures = Vec::new();
    for (name, mutate, expected) in &mutations {
        let mut rel = flood();
        mutate(&mut rel);
        let codes = validate_relation(&rel, P).codes();
        if codes != vec![*expected] {
            failures.push(format!("{name}: expected [{expected}], got {codes:?}"));
        }
    }
    // corpus-level rule
    let mut corpus = Corpus::with_relations("dup", P, vec![flood(), flood()]);
    corpus.revalidate();
    let dup: Vec<IssueCode> = corpus.validation_ledger.iter().map(|e| e.code).collect();
    if dup != vec![IssueCode::DuplicateId] {
        failures.push(format!("duplicate id: got {dup:?}"));
    }
    check(failures.is_empty(), || failures.join("; "))?;
    Ok(format!("{} mutations, each with exactly its expected code", mutations.len() + 1))
}

/// Source annotation count, counted from the raw fixture text.
fn raw_count(adapter: &str, root: &Path) -> usize {
    let read = |rel: &str| std::fs::read_to_string(root.join(rel)).unwrap_or_default();
    let tab_records = |text: String| {
        text.lines()
            .filter(|l| {
                l.split_once('\t')
                    .is_some_and(|(id, rest)| !id.is_empty() && id.bytes().all(|b| b.is_ascii_digit()) && rest.starts_with('"'))
            })
            .count()
    };
    match adapter {
        "semeval2007" => tab_records(read("semeval2007/task4-cause-effect.txt")),
        "semeval2010" => tab_records(read("semeval2010/TRAIN_FILE.TXT")),
        "eventcausality" => read("eventcausality/news_001.rel")
            .lines()
            .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
            .count(),
        "causal-timebank" => read("causal-timebank/wsj_0026.tml").matches("<CLINK ").count(),
        "eventstoryline" => read("eventstoryline/1_1ecbplus.xml").matches("<PLOT_LINK ").count(),
        "caters" => read("caters/story_0001.ann").lines().filter(|l| l.starts_with('R')).count(),
        "because" => read("because/nyt_0001.ann").lines().filter(|l| l.starts_with('E')).count(),
        "copa" => {
            let xml = read("copa/copa-dev.xml");
            xml.matches("<a1>").count() + xml.matches("<a2>").count()
        }
        "pdtb3" => read("pdtb3/gold/00/wsj_0099").lines().filter(|l| !l.trim().is_empty()).count(),
        other => panic!("no raw count for {other}"),
    }
}

const ADAPTERS: [&str; 9] = [
    "semeval2007",
    "semeval2010",
    "eventcausality",
    "causal-timebank",
    "eventstoryline",
    "caters",
    "because",
    "copa",
    "pdtb3",
];

fn adapter_conservation() -> Outcome {
    let root = fixtures();
    let mut emitted = 0;
    let mut skipped = 0;
    for name in ADAPTERS {
        let spec = adapter_by_name(name).map_err(|e| e.to_string())?;
        let out = parse_with_adapter(spec, &[root.join(name)], P).map_err(|e| format!("{name}: {e}"))?;
        let expected = raw_count(name, &root);
        check(expected > 0, || format!("{name}: fixture has no annotations"))?;
        check(out.relations.len() + out.skips.len() == expected, || {
            format!("{name}: {} emitted + {} skipped != {expected}", out.relations.len(), out.skips.len())
        })?;
        for rel in &out.relations {
            let report = validate_relation(rel, P);
            check(report.is_valid(), || format!("{name} {}: {report}", rel.original_id))?;
        }
        emitted += out.relations.len();
        skipped += out.skips.len();

        if name == "eventcausality" {
            let r_ids: Vec<String> = std::fs::read_to_string(root.join("eventcausality/news_001.rel"))
                .unwrap()
                .lines()
                .filter_map(|l| {
                    let cols: Vec<&str> = l.split('\t').collect();
                    (cols.len() > 1 && cols[1] == "R").then(|| format!("news_001:{}", cols[0]))
                })
                .collect();
            let excluded: Vec<String> = out
                .skips
                .iter()
                .filter(|s| s.reason == SkipReason::ExcludedRelationType)
                .map(|s| s.original_id.clone())
                .collect();
            check(!r_ids.is_empty() && excluded == r_ids, || {
                format!("EventCausality R relations {r_ids:?}, excluded {excluded:?}")
            })?;
        }
        if name == "pdtb3" {
            let gold = std::fs::read_to_string(root.join("pdtb3/gold/00/wsj_0099")).unwrap();
            let line = gold
                .lines()
                .position(|l| l.contains("Cause.NegResult"))
                .ok_or("fixture has no NegResult record")?;
            let id = format!("wsj_0099:{}", line + 1);
            let skip = out.skips.iter().find(|s| s.original_id == id);
            check(skip.is_some_and(|s| s.reason == SkipReason::ExcludedSense), || {
                format!("NegResult record {id}: {skip:?}")
            })?;
        }
    }
    Ok(format!("9 adapters, {emitted} emitted + {skipped} skipped, all valid"))
}

// -- leakage --

const VOCAB: [&str; 40] = [
    "river", "storm", "bank", "market", "price", "rain", "flood", "crop", "farmer", "town", "road", "bridge", "water",
    "wind", "power", "grid", "school", "child", "doctor", "fever", "virus", "trade", "tariff", "factory", "worker",
    "strike", "fire", "smoke", "alarm", "crowd", "police", "court", "ruling", "loan", "rate", "bond", "oil", "ship",
    "port", "delay",
];

fn words(rng: &mut ChaCha8Rng, n: usize) -> String {
    (0..n).map(|_| *VOCAB.choose(rng).unwrap()).collect::<Vec<_>>().join(" ")
}

fn planted_relation(i: usize, context: String, rng: &mut ChaCha8Rng) -> CrestRelation {
    let w = word_offsets(&context);
    let a = rng.random_range(0..w.len() / 2);
    let b = rng.random_range(w.len() / 2..w.len());
    CrestRelation {
        original_id: format!("g{i}"),
        dataset_id: 1,
        span1: span_of(&context, &w[a..=a]),
        span2: span_of(&context, &w[b..=b]),
        signal: TokenSpan::empty(),
        context,
        label: 1,
        direction: rng.random_range(0..2),
        split: -1,
    }
}

/// Contexts with planted duplicates, containments and shared 50+ char runs.
fn planted_corpus(n: usize, seed: u64) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut contexts: Vec<String> = Vec::new();
    let base = n * 2 / 5;
    for _ in 0..base {
        let len = rng.random_range(10..28);
        contexts.push(words(&mut rng, len));
    }
    while contexts.len() < n {
        let src = contexts[rng.random_range(0..contexts.len())].clone();
        let planted = match rng.random_range(0..3) {
            // same text up to case
            0 => {
                let mut c = src.chars();
                let first = c.next().unwrap().to_uppercase().collect::<String>();
                first + c.as_str()
            }
            // contained: src inside a longer context, or a prefix of src
            1 => {
                if rng.random_bool(0.5) {
                    let extra = rng.random_range(2..6);
                    format!("{} {src}", words(&mut rng, extra))
                } else {
                    let w = word_offsets(&src);
                    slice(&src, (0, w[w.len() / 2].1))
                }
            }
            // shared run of at least 50 chars, with fresh text around it
            _ => {
                let chars: Vec<char> = src.chars().collect();
                let len = 60.min(chars.len());
                let start = rng.random_range(0..=chars.len() - len);
                let run: String = chars[start..start + len].iter().collect();
                let (pre, post) = (rng.random_range(3..8), rng.random_range(3..8));
                format!("{} {} {}", words(&mut rng, pre), run.trim(), words(&mut rng, post))
            }
        };
        contexts.push(planted);
    }
    let relations = contexts
        .into_iter()
        .enumerate()
        .map(|(i, c)| planted_relation(i, c, &mut rng))
        .collect();
    Corpus::with_relations("planted", P, relations)
}

fn casefold(s: &str) -> String {
    s.to_lowercase().split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Pairs of relation indices that overlap under `mode`, computed without
/// the splitter: equality by hashing, containment by substring search,
/// shared runs by indexing every window of `min` chars.
fn oracle_overlaps(texts: &[String], mode: OverlapMode, min: usize) -> HashSet<(usize, usize)> {
    let mut pairs = HashSet::new();
    let mut add = |a: usize, b: usize| {
        if a != b {
            pairs.insert((a.min(b), a.max(b)));
        }
    };
    let mut by_text: HashMap<&str, Vec<usize>> = HashMap::new();
    for (i, t) in texts.iter().enumerate() {
        by_text.entry(t).or_default().push(i);
    }
    for members in by_text.values() {
        for &a in members {
            for &b in members {
                add(a, b);
            }
        }
    }
    if mode == OverlapMode::Equality {
        return pairs;
    }
    for i in 0..texts.len() {
        for j in 0..texts.len() {
            if i != j && texts[i].contains(texts[j].as_str()) {
                add(i, j);
            }
        }
    }
    if mode == OverlapMode::Containment {
        return pairs;
    }
    let mut windows: HashMap<String, Vec<usize>> = HashMap::new();
    for (i, t) in texts.iter().enumerate() {
        let chars: Vec<char> = t.chars().collect();
        if chars.len() < min {
            continue;
        }
        let mut seen = HashSet::new();
        for w in chars.windows(min) {
            let key: String = w.iter().collect();
            if seen.insert(key.clone()) {
                windows.entry(key).or_default().push(i);
            }
        }
    }
    for members in windows.values() {
        for &a in members {
            for &b in members {
                add(a, b);
            }
        }
    }
    pairs
}

/// Largest connected component of the overlap graph.
fn largest_component(n: usize, pairs: &HashSet<(usize, usize)>) -> usize {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in pairs {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut seen = vec![false; n];
    let mut best = 0;
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut stack = vec![s];
        seen[s] = true;
        let mut size = 0;
        while let Some(v) = stack.pop() {
            size += 1;
            for &u in &adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        best = best.max(size);
    }
    best
}

fn leakage_freedom() -> Outcome {
    let corpus = planted_corpus(LEAKAGE_CORPUS, 2024);
    check(corpus.len() == LEAKAGE_CORPUS, || format!("generated {} relations", corpus.len()))?;
    let texts: Vec<String> = corpus.relations.iter().map(|r| casefold(&r.context)).collect();
    let mut notes = Vec::new();
    for mode in OverlapMode::ALL {
        let policy = OverlapPolicy::with_mode(mode);
        let config = SplitConfig::new(TARGET_RATIOS, 7).map_err(|e| e.to_string())?;
        let (split, report) = split_corpus(&corpus, &policy, &config).map_err(|e| format!("{mode}: {e}"))?;
        let (again, _) = split_corpus(&corpus, &policy, &config).map_err(|e| format!("{mode}: {e}"))?;
        let bytes = corpus_to_string(&split).map_err(|e| e.to_string())?;
        check(bytes == corpus_to_string(&again).map_err(|e| e.to_string())?, || {
            format!("{mode}: two seeded runs differ")
        })?;

        let audit = audit_splits(&split, &policy);
        check(audit.passed(), || format!("{mode}: splitter audit found {} pairs", audit.violations()))?;

        let overlaps = oracle_overlaps(&texts, mode, policy.min_shared_chars);
        let leaks = overlaps
            .iter()
            .filter(|&&(a, b)| split.relations[a].split != split.relations[b].split)
            .count();
        check(split.relations.iter().all(|r| (0..=2).contains(&r.split)), || format!("{mode}: unassigned relation"))?;
        check(leaks == 0, || format!("{mode}: oracle found {leaks} cross-split overlapping pairs"))?;

        let max_group = largest_component(texts.len(), &overlaps);
        check(max_group == report.max_group_size, || {
            format!("{mode}: oracle max group {max_group}, splitter {}", report.max_group_size)
        })?;
        let bound = max_group as f64 / LEAKAGE_CORPUS as f64;
        let mut counts = [0usize; 3];
        for r in &split.relations {
            counts[r.split as usize] += 1;
        }
        for k in 0..3 {
            let achieved = counts[k] as f64 / LEAKAGE_CORPUS as f64;
            check((achieved - TARGET_RATIOS[k]).abs() <= bound + 1e-12, || {
                format!("{mode}: split {k} ratio {achieved:.4} outside {:.2}±{bound:.4}", TARGET_RATIOS[k])
            })?;
        }
        notes.push(format!("{mode} {}/{}/{} (max group {max_group}, {} overlapping pairs)", counts[0], counts[1], counts[2], overlaps.len()));
    }
    Ok(notes.join(", "))
}

// -- direction blindness --

fn random_causal(i: usize, rng: &mut ChaCha8Rng) -> CrestRelation {
    let len = rng.random_range(4..20);
    let context = words(rng, len);
    let w = word_offsets(&context);
    // two disjoint word runs, possibly adjacent, in either order
    let cut = rng.random_range(1..w.len());
    let a0 = rng.random_range(0..cut);
    let a1 = rng.random_range(a0..cut);
    let b0 = rng.random_range(cut..w.len());
    let b1 = rng.random_range(b0..w.len());
    let (first, second) = (span_of(&context, &w[a0..=a1]), span_of(&context, &w[b0..=b1]));
    let (span1, span2) = if rng.random_bool(0.5) { (first, second) } else { (second, first) };
    CrestRelation {
        original_id: format!("b{i}"),
        dataset_id: 3,
        span1,
        span2,
        signal: TokenSpan::empty(),
        context,
        label: 1,
        direction: rng.random_range(0..2),
        split: 0,
    }
}

fn remove_markers_oracle(text: &str, scheme: &MarkerScheme) -> String {
    let mut out = text.to_string();
    for m in scheme.all_markers() {
        out = out.replace(m, " ");
    }
    out.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn direction_blindness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let scheme = MarkerScheme::default();
    for i in 0..BLINDNESS_CASES {
        let rel = random_causal(i, &mut rng);
        let report = validate_relation(&rel, P);
        check(report.is_valid(), || format!("{}: generated invalid relation: {report}", rel.original_id))?;
        let flipped = rel.flipped();
        check(flipped.direction != rel.direction, || "flip kept the direction".into())?;
        let a = to_sequence(&rel, &scheme, false, Task::Direction).map_err(|e| e.to_string())?;
        let b = to_sequence(&flipped, &scheme, false, Task::Direction).map_err(|e| e.to_string())?;
        check(a.text == b.text, || format!("{}: text changed under flip:\n{}\n{}", rel.original_id, a.text, b.text))?;
        check(a.target != b.target, || format!("{}: target unchanged under flip", rel.original_id))?;
        check(a.target == rel.direction && b.target == flipped.direction, || {
            format!("{}: target is not the direction", rel.original_id)
        })?;
        check(strip_markers(&a.text, &scheme) == rel.context, || {
            format!("{}: stripping gave {:?}", rel.original_id, strip_markers(&a.text, &scheme))
        })?;
        check(remove_markers_oracle(&a.text, &scheme) == rel.context, || {
            format!("{}: marker removal oracle disagrees", rel.original_id)
        })?;
    }
    Ok(format!("{BLINDNESS_CASES} relations"))
}

fn flood_example() -> Outcome {
    let rel = flood();
    let report = validate_relation(&rel, P);
    check(report.is_valid(), || format!("flood relation invalid: {report}"))?;
    // offsets re-derived by searching the sentence
    let at = |needle: &str| {
        let b = FLOOD.find(needle).unwrap();
        let s = FLOOD[..b].chars().count();
        (s, s + needle.chars().count())
    };
    check(rel.span1.extent() == Some(at("flood")), || "span1 offsets".into())?;
    check(rel.span2.extent() == Some(at("deluge of rain")), || "span2 offsets".into())?;
    let seq = to_sequence(&rel, &MarkerScheme::default(), false, Task::Direction).map_err(|e| e.to_string())?;
    let expected = "The river had now turned into full [unused1] flood [unused2] after the [unused3] deluge of rain [unused4] a few days ago.";
    check(seq.text == expected, || format!("got {:?}", seq.text))?;
    check(seq.target == 1, || format!("target {}", seq.target))?;
    Ok("valid at (35,40)/(51,65), marker text and target 1 match".into())
}

// -- end-to-end --

fn pipeline_config(dir: &Path) -> PathBuf {
    let mut toml = String::from("seed = 11\n\n");
    for name in ADAPTERS {
        let spec = adapter_by_name(name).unwrap();
        toml.push_str(&format!(
            "[[datasets]]\ndataset_id = {}\nadapter = \"{name}\"\ninputs = [{:?}]\n\n",
            spec.dataset_id,
            fixtures().join(name)
        ));
    }
    toml.push_str("[sequence]\ntask = \"pair\"\n");
    let path = dir.join("pipeline.toml");
    std::fs::write(&path, toml).unwrap();
    path
}

fn tree(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push((p.strip_prefix(dir).unwrap().to_path_buf(), std::fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

fn end_to_end_determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = pipeline_config(tmp.path());
    let mut trees = Vec::new();
    for run in ["a", "b"] {
        let out = tmp.path().join(run);
        let status = Command::new(env!("CARGO_BIN_EXE_crest-forge"))
            .args(["run", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .output()
            .map_err(|e| e.to_string())?;
        check(status.status.success(), || {
            format!("run {run} failed: {}", String::from_utf8_lossy(&status.stderr))
        })?;
        trees.push(tree(&out));
    }
    check(trees[0].len() >= 8, || format!("only {} output files", trees[0].len()))?;
    check(trees[0] == trees[1], || "outputs differ between runs".into())?;
    let bytes: usize = trees[0].iter().map(|(_, b)| b.len()).sum();
    Ok(format!("{} files, {bytes} bytes, identical", trees[0].len()))
}

fn licensed_counts(root: &Path) -> Outcome {
    let causal = |name: &str| -> Result<usize, String> {
        let spec = adapter_by_name(name).map_err(|e| e.to_string())?;
        let out = parse_with_adapter(spec, &[root.join(name)], P).map_err(|e| e.to_string())?;
        Ok(out.relations.iter().filter(|r| r.label == 1).count())
    };
    let within = |got: usize, want: usize| (got as f64 - want as f64).abs() <= COUNT_TOLERANCE * want as f64;
    let (pdtb, copa, esl) = (causal("pdtb3")?, causal("copa")?, causal("eventstoryline")?);
    let msg = format!("PDTB3 {pdtb}, COPA {copa}, ESL {esl}");
    check(within(pdtb, 7991) && copa == 1000 && within(esl, 2608), || msg.clone())?;
    Ok(msg)
}

fn main() {
    let mut failed = 0;
    let mut report = |name: &str, outcome: Outcome| match outcome {
        Ok(detail) => println!("PASS {name}: {detail}"),
        Err(detail) => {
            failed += 1;
            println!("FAIL {name}: {detail}");
        }
    };
    report("schema-mutations", timed(MUTATION_LIMIT, mutation_suite));
    report("adapter-conservation", timed(ADAPTER_LIMIT, adapter_conservation));
    report("leakage-freedom", timed(LEAKAGE_LIMIT, leakage_freedom));
    report("direction-blindness", timed(BLINDNESS_LIMIT, direction_blindness));
    report("flood-example", flood_example());
    report("end-to-end-determinism", end_to_end_determinism());
    match std::env::var_os("CREST_FORGE_LICENSED_DIR") {
        Some(dir) => report("licensed-counts", licensed_counts(Path::new(&dir))),
        None => println!("SKIP licensed-counts: CREST_FORGE_LICENSED_DIR not set"),
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
