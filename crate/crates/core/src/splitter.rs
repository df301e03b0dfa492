//! Leakage-free train/dev/test assignment.
//!
//! Relations whose contexts overlap are grouped into connected components
//! and every component goes to exactly one split, so no context text is
//! shared between train and dev, or between train+dev and test.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use petgraph::unionfind::UnionFind;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Corpus, SPLIT_TEST, SPLIT_TRAIN};
use crate::text::collapse_whitespace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum OverlapNormalization {
    #[serde(rename = "exact")]
    Exact,
    #[default]
    #[serde(rename = "casefold+collapse-whitespace")]
    CasefoldCollapse,
}

impl OverlapNormalization {
    pub fn as_str(self) -> &'static str {
        match self {
            OverlapNormalization::Exact => "exact",
            OverlapNormalization::CasefoldCollapse => "casefold+collapse-whitespace",
        }
    }

    pub fn apply(self, text: &str) -> String {
        match self {
            OverlapNormalization::Exact => text.to_string(),
            OverlapNormalization::CasefoldCollapse => collapse_whitespace(&text.to_lowercase()),
        }
    }
}

impl FromStr for OverlapNormalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(OverlapNormalization::Exact),
            "casefold+collapse-whitespace" | "casefold" => Ok(OverlapNormalization::CasefoldCollapse),
            other => Err(Error::BadPolicy(format!("unknown normalization `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OverlapMode {
    Equality,
    #[default]
    Containment,
    SharedSubstring,
}

impl OverlapMode {
    pub const ALL: [OverlapMode; 3] = [
        OverlapMode::Equality,
        OverlapMode::Containment,
        OverlapMode::SharedSubstring,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            OverlapMode::Equality => "equality",
            OverlapMode::Containment => "containment",
            OverlapMode::SharedSubstring => "shared-substring",
        }
    }
}

impl fmt::Display for OverlapMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OverlapMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        OverlapMode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::BadPolicy(format!("unknown overlap mode `{s}`")))
    }
}

pub const DEFAULT_MIN_SHARED_CHARS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverlapPolicy {
    #[serde(default)]
    pub normalization: OverlapNormalization,
    #[serde(default)]
    pub mode: OverlapMode,
    #[serde(default = "default_min_shared")]
    pub min_shared_chars: usize,
}

fn default_min_shared() -> usize {
    DEFAULT_MIN_SHARED_CHARS
}

impl Default for OverlapPolicy {
    fn default() -> Self {
        OverlapPolicy {
            normalization: OverlapNormalization::default(),
            mode: OverlapMode::default(),
            min_shared_chars: DEFAULT_MIN_SHARED_CHARS,
        }
    }
}

impl OverlapPolicy {
    pub fn new(normalization: OverlapNormalization, mode: OverlapMode, min_shared_chars: usize) -> Result<Self> {
        let policy = OverlapPolicy {
            normalization,
            mode,
            min_shared_chars,
        };
        policy.check()?;
        Ok(policy)
    }

    pub fn with_mode(mode: OverlapMode) -> Self {
        OverlapPolicy {
            mode,
            ..OverlapPolicy::default()
        }
    }

    pub fn check(&self) -> Result<()> {
        if self.min_shared_chars == 0 {
            return Err(Error::BadPolicy("min_shared_chars must be at least 1".into()));
        }
        Ok(())
    }
}

/// Suffix automaton over the chars of one string; answers "longest
/// substring of this string that also occurs in `other`" in O(|other|).
#[derive(Debug, Clone)]
pub struct SuffixAutomaton {
    next: Vec<HashMap<char, usize>>,
    link: Vec<Option<usize>>,
    len: Vec<usize>,
}

impl SuffixAutomaton {
    pub fn new(text: &str) -> Self {
        let mut sa = SuffixAutomaton {
            next: vec![HashMap::new()],
            link: vec![None],
            len: vec![0],
        };
        let mut last = 0;
        for c in text.chars() {
            let cur = sa.push_state(sa.len[last] + 1);
            let mut p = Some(last);
            while let Some(q) = p {
                if sa.next[q].contains_key(&c) {
                    break;
                }
                sa.next[q].insert(c, cur);
                p = sa.link[q];
            }
            match p {
                None => sa.link[cur] = Some(0),
                Some(p) => {
                    let q = sa.next[p][&c];
                    if sa.len[p] + 1 == sa.len[q] {
                        sa.link[cur] = Some(q);
                    } else {
                        let clone = sa.push_state(sa.len[p] + 1);
                        sa.next[clone] = sa.next[q].clone();
                        sa.link[clone] = sa.link[q];
                        let mut p = Some(p);
                        while let Some(pp) = p {
                            if sa.next[pp].get(&c) != Some(&q) {
                                break;
                            }
                            sa.next[pp].insert(c, clone);
                            p = sa.link[pp];
                        }
                        sa.link[q] = Some(clone);
                        sa.link[cur] = Some(clone);
                    }
                }
            }
            last = cur;
        }
        sa
    }

    fn push_state(&mut self, len: usize) -> usize {
        self.next.push(HashMap::new());
        self.link.push(None);
        self.len.push(len);
        self.len.len() - 1
    }

    /// Length in chars of the longest common substring with `other`.
    pub fn longest_common(&self, other: &str) -> usize {
        let (mut state, mut cur, mut best) = (0usize, 0usize, 0usize);
        for c in other.chars() {
            loop {
                if let Some(&n) = self.next[state].get(&c) {
                    state = n;
                    cur += 1;
                    break;
                }
                match self.link[state] {
                    Some(l) => {
                        state = l;
                        cur = self.len[state];
                    }
                    None => {
                        cur = 0;
                        break;
                    }
                }
            }
            best = best.max(cur);
        }
        best
    }
}

/// Length in chars of the longest common substring of `a` and `b`.
pub fn longest_common_substring(a: &str, b: &str) -> usize {
    SuffixAutomaton::new(a).longest_common(b)
}

/// A context prepared for repeated overlap tests.
struct Prepared {
    text: String,
    chars: usize,
    automaton: Option<SuffixAutomaton>,
}

impl Prepared {
    fn new(context: &str, policy: &OverlapPolicy) -> Self {
        let text = policy.normalization.apply(context);
        let automaton = (policy.mode == OverlapMode::SharedSubstring).then(|| SuffixAutomaton::new(&text));
        Prepared {
            chars: text.chars().count(),
            text,
            automaton,
        }
    }

    fn overlaps(&self, other: &Prepared, policy: &OverlapPolicy) -> bool {
        if self.text == other.text {
            return true;
        }
        if policy.mode == OverlapMode::Equality {
            return false;
        }
        if self.text.contains(other.text.as_str()) || other.text.contains(self.text.as_str()) {
            return true;
        }
        if policy.mode == OverlapMode::Containment {
            return false;
        }
        if self.chars.min(other.chars) < policy.min_shared_chars {
            return false;
        }
        let (sa, probe) = match (&self.automaton, &other.automaton) {
            (Some(sa), _) => (sa, &other.text),
            (None, Some(sa)) => (sa, &self.text),
            (None, None) => return longest_common_substring(&self.text, &other.text) >= policy.min_shared_chars,
        };
        sa.longest_common(probe) >= policy.min_shared_chars
    }
}

/// Whether two contexts overlap under `policy`. Symmetric and reflexive.
pub fn context_overlap(a: &str, b: &str, policy: &OverlapPolicy) -> bool {
    Prepared::new(a, policy).overlaps(&Prepared::new(b, policy), policy)
}

/// Connected components of the context-overlap graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverlapPartition {
    /// Sorted member indices per group; groups ordered by smallest member.
    pub groups: Vec<Vec<usize>>,
    pub policy: OverlapPolicy,
}

impl OverlapPartition {
    pub fn max_group_size(&self) -> usize {
        self.groups.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn covered(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }
}

/// Distinct normalized contexts, each prepared once, plus the mapping from
/// relation index to distinct-context index.
fn prepare_distinct(contexts: &[&str], policy: &OverlapPolicy) -> (Vec<Prepared>, Vec<usize>) {
    let mut seen: HashMap<String, usize> = HashMap::new();
    let mut distinct_texts = Vec::new();
    let mut owner = Vec::with_capacity(contexts.len());
    for c in contexts {
        let norm = policy.normalization.apply(c);
        let id = *seen.entry(norm).or_insert_with(|| {
            distinct_texts.push(*c);
            distinct_texts.len() - 1
        });
        owner.push(id);
    }
    let prepared = distinct_texts.par_iter().map(|c| Prepared::new(c, policy)).collect();
    (prepared, owner)
}

pub fn partition_contexts(contexts: &[&str], policy: &OverlapPolicy) -> OverlapPartition {
    let n = contexts.len();
    let (distinct, owner) = prepare_distinct(contexts, policy);
    let m = distinct.len();
    let edges: Vec<(usize, usize)> = if policy.mode == OverlapMode::Equality {
        Vec::new()
    } else {
        (0..m)
            .into_par_iter()
            .flat_map_iter(|i| {
                let distinct = &distinct;
                ((i + 1)..m).filter_map(move |j| distinct[i].overlaps(&distinct[j], policy).then_some((i, j)))
            })
            .collect()
    };
    let mut uf = UnionFind::<usize>::new(m);
    for (i, j) in edges {
        uf.union(i, j);
    }
    let mut by_root: HashMap<usize, usize> = HashMap::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (idx, d) in owner.iter().enumerate().take(n) {
        let root = uf.find(*d);
        let g = *by_root.entry(root).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(idx);
    }
    log::debug!("{} relation(s) in {} overlap group(s)", n, groups.len());
    OverlapPartition {
        groups,
        policy: *policy,
    }
}

pub fn build_overlap_partition(corpus: &Corpus, policy: &OverlapPolicy) -> OverlapPartition {
    let contexts: Vec<&str> = corpus.relations.iter().map(|r| r.context.as_str()).collect();
    partition_contexts(&contexts, policy)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitConfig {
    pub ratios: [f64; 3],
    pub seed: u64,
}

impl SplitConfig {
    pub const DEFAULT_RATIOS: [f64; 3] = [0.8, 0.1, 0.1];

    pub fn new(ratios: [f64; 3], seed: u64) -> Result<Self> {
        let config = SplitConfig { ratios, seed };
        config.check()?;
        Ok(config)
    }

    pub fn check(&self) -> Result<()> {
        let ok = self.ratios.iter().all(|r| r.is_finite() && *r >= 0.0)
            && (self.ratios.iter().sum::<f64>() - 1.0).abs() < 1e-9;
        if ok {
            Ok(())
        } else {
            Err(Error::BadRatios(self.ratios))
        }
    }
}

/// Group processing order: size descending, then smallest member, with
/// equal-size runs shuffled by the seeded generator.
fn group_order(partition: &OverlapPartition, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..partition.groups.len()).collect();
    order.sort_by_key(|&g| (std::cmp::Reverse(partition.groups[g].len()), partition.groups[g][0]));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut start = 0;
    while start < order.len() {
        let size = partition.groups[order[start]].len();
        let end = start + order[start..].iter().take_while(|&&g| partition.groups[g].len() == size).count();
        order[start..end].shuffle(&mut rng);
        start = end;
    }
    order
}

/// Split index (0 train, 1 dev, 2 test) for every group, in group order.
pub fn assign_groups(partition: &OverlapPartition, config: &SplitConfig) -> Result<Vec<i32>> {
    config.check()?;
    let total = partition.covered() as f64;
    let mut current = [0usize; 3];
    let mut assignment = vec![SPLIT_TRAIN; partition.groups.len()];
    for g in group_order(partition, config.seed) {
        let mut best = 0;
        let mut best_deficit = f64::NEG_INFINITY;
        for (k, ratio) in config.ratios.iter().enumerate() {
            let deficit = ratio * total - current[k] as f64;
            if deficit > best_deficit + 1e-9 {
                best = k;
                best_deficit = deficit;
            }
        }
        current[best] += partition.groups[g].len();
        assignment[g] = best as i32;
    }
    Ok(assignment)
}

/// Returns a copy of `corpus` with every relation's split set from its group.
pub fn assign_splits(corpus: &Corpus, partition: &OverlapPartition, config: &SplitConfig) -> Result<Corpus> {
    if partition.covered() != corpus.len() {
        return Err(Error::UnassignedSplit(corpus.len().abs_diff(partition.covered())));
    }
    let assignment = assign_groups(partition, config)?;
    let mut out = corpus.clone();
    for (group, split) in partition.groups.iter().zip(assignment) {
        for &i in group {
            out.relations[i].split = split;
        }
    }
    Ok(out)
}

/// Result of the pairwise leakage audit.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitAudit {
    /// Overlapping (train, dev) pairs.
    pub train_dev: Vec<(usize, usize)>,
    /// Overlapping (train or dev, test) pairs.
    pub trainval_test: Vec<(usize, usize)>,
    pub unassigned: usize,
}

impl SplitAudit {
    pub fn passed(&self) -> bool {
        self.train_dev.is_empty() && self.trainval_test.is_empty() && self.unassigned == 0
    }

    pub fn violations(&self) -> usize {
        self.train_dev.len() + self.trainval_test.len()
    }
}

/// Checks every cross-split pair of relations for context overlap.
pub fn audit_splits(corpus: &Corpus, policy: &OverlapPolicy) -> SplitAudit {
    let rels = &corpus.relations;
    let prepared: Vec<Prepared> = rels.par_iter().map(|r| Prepared::new(&r.context, policy)).collect();
    let pairs: Vec<(usize, usize)> = (0..rels.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let prepared = &prepared;
            ((i + 1)..rels.len()).filter_map(move |j| {
                let (si, sj) = (rels[i].split, rels[j].split);
                let crosses = si != sj && [si, sj].iter().all(|s| (SPLIT_TRAIN..=SPLIT_TEST).contains(s));
                (crosses && prepared[i].overlaps(&prepared[j], policy)).then_some((i, j))
            })
        })
        .collect();
    let mut audit = SplitAudit {
        unassigned: rels.iter().filter(|r| !(SPLIT_TRAIN..=SPLIT_TEST).contains(&r.split)).count(),
        ..SplitAudit::default()
    };
    for (i, j) in pairs {
        if rels[i].split == SPLIT_TEST || rels[j].split == SPLIT_TEST {
            audit.trainval_test.push((i, j));
        } else {
            audit.train_dev.push((i, j));
        }
    }
    audit
}

/// JSON-serializable summary of a split run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitReport {
    pub policy: OverlapPolicy,
    pub seed: u64,
    pub target_ratios: [f64; 3],
    pub relation_count: usize,
    pub group_count: usize,
    pub max_group_size: usize,
    /// Group sizes in group order.
    pub group_sizes: Vec<usize>,
    pub split_counts: [usize; 3],
    pub achieved_ratios: [f64; 3],
    pub audit_passed: bool,
    pub audit_violations: usize,
}

/// Partition, assign and audit. An audit failure is an error.
pub fn split_corpus(corpus: &Corpus, policy: &OverlapPolicy, config: &SplitConfig) -> Result<(Corpus, SplitReport)> {
    policy.check()?;
    config.check()?;
    let partition = build_overlap_partition(corpus, policy);
    let split = assign_splits(corpus, &partition, config)?;
    let audit = audit_splits(&split, policy);
    if !audit.passed() {
        return Err(Error::AuditFailed(audit.violations()));
    }
    let mut counts = [0usize; 3];
    for r in &split.relations {
        counts[r.split as usize] += 1;
    }
    let n = split.len();
    let achieved = counts.map(|c| if n == 0 { 0.0 } else { c as f64 / n as f64 });
    let report = SplitReport {
        policy: *policy,
        seed: config.seed,
        target_ratios: config.ratios,
        relation_count: n,
        group_count: partition.groups.len(),
        max_group_size: partition.max_group_size(),
        group_sizes: partition.groups.iter().map(Vec::len).collect(),
        split_counts: counts,
        achieved_ratios: achieved,
        audit_passed: true,
        audit_violations: 0,
    };
    Ok((split, report))
}
