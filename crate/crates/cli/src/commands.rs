//! Subcommand bodies.

use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::Context as _;
use crest_forge::adapters::{adapter_by_name, SkipReason, SkipRecord};
use crest_forge::io::{read_corpus, read_corpus_lenient, write_corpus, write_jsonl};
use crest_forge::sequence::emit_task_dataset;
use crest_forge::splitter::split_corpus;
use crest_forge::{
    compute_stats, parse_with_adapter, render_report, Corpus, MarkerScheme, NormalizationPolicy, OverlapMode,
    OverlapPolicy, ReportFormat, SplitConfig, Task,
};

use crate::config::{config_error, PipelineConfig};

/// A data problem detected by the CLI itself (exit code 2).
#[derive(Debug)]
pub struct DataError {
    pub kind: &'static str,
    pub message: String,
}

impl fmt::Display for DataError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for DataError {}

fn data_error(kind: &'static str, message: impl Into<String>) -> anyhow::Error {
    DataError {
        kind,
        message: message.into(),
    }
    .into()
}

fn write_text(path: &Path, text: &str) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn ensure_parent(path: &Path) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(())
}

/// `corpus.jsonl` -> `corpus.skips.jsonl`, next to it.
pub fn skips_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.skips.jsonl"))
}

fn load_optional(config: Option<&Path>) -> anyhow::Result<Option<PipelineConfig>> {
    config.map(PipelineConfig::load).transpose()
}

fn normalization_of(config: Option<&PipelineConfig>) -> NormalizationPolicy {
    config.map(|c| c.normalization).unwrap_or_default()
}

/// Runs every configured adapter; datasets are merged in ascending id order.
fn convert_all(config: &PipelineConfig) -> anyhow::Result<(Corpus, Vec<SkipRecord>)> {
    let mut relations = Vec::new();
    let mut skips = Vec::new();
    for entry in config.datasets_by_id() {
        let adapter = adapter_by_name(&entry.adapter)?;
        let out = parse_with_adapter(adapter, &entry.inputs, config.normalization)
            .with_context(|| format!("converting dataset {}", entry.dataset_id))?;
        if !out.is_conserved() {
            return Err(data_error(
                "conservation",
                format!("{}: {} candidates but {} outcomes", adapter.name, out.candidates, out.relations.len() + out.skips.len()),
            ));
        }
        relations.extend(out.relations);
        skips.extend(out.skips);
    }
    let mut corpus = Corpus::with_relations("corpus", config.normalization, relations);
    if !corpus.revalidate() {
        let first = &corpus.validation_ledger[0];
        return Err(data_error(
            "invalid_record",
            format!(
                "{} validation issue(s), first: {} on {}",
                corpus.validation_ledger.len(),
                first.code.as_str(),
                corpus.relations[first.index].original_id
            ),
        ));
    }
    Ok((corpus, skips))
}

fn write_converted(corpus: &Corpus, skips: &[SkipRecord], out: &Path, strict: bool) -> anyhow::Result<()> {
    ensure_parent(out)?;
    write_corpus(corpus, out)?;
    write_jsonl(&skips_path(out), skips)?;
    let malformed = skips.iter().filter(|s| s.reason == SkipReason::Malformed).count();
    println!("{} relations, {} skipped ({} malformed)", corpus.len(), skips.len(), malformed);
    if strict && malformed > 0 {
        return Err(data_error("malformed_skips", format!("{malformed} annotation(s) skipped as MALFORMED")));
    }
    Ok(())
}

pub fn convert(config_path: &Path, out: Option<&Path>, strict: bool) -> anyhow::Result<()> {
    let config = PipelineConfig::load(config_path)?;
    let out = match (out, &config.output_dir) {
        (Some(p), _) => p.to_path_buf(),
        (None, Some(dir)) => dir.join("corpus.jsonl"),
        (None, None) => return Err(config_error("no --out given and no output_dir in the config")),
    };
    let (corpus, skips) = convert_all(&config)?;
    write_converted(&corpus, &skips, &out, strict)
}

pub fn validate(input: &Path, normalization: NormalizationPolicy) -> anyhow::Result<()> {
    let corpus = read_corpus_lenient(input, normalization)?;
    for entry in &corpus.validation_ledger {
        let rel = &corpus.relations[entry.index];
        println!("line {}: {} {}", entry.index + 1, rel.original_id, entry.code.as_str());
    }
    let issues = corpus.validation_ledger.len();
    println!("{} relations, {} issues", corpus.len(), issues);
    if issues > 0 {
        return Err(data_error("validation_issues", format!("{issues} issue(s) in {}", input.display())));
    }
    Ok(())
}

pub struct SplitOptions {
    pub input: PathBuf,
    pub out: PathBuf,
    pub config: Option<PathBuf>,
    pub policy: Option<OverlapMode>,
    pub min_shared: Option<usize>,
    pub seed: Option<u64>,
    pub ratios: Option<Vec<f64>>,
    pub report: Option<PathBuf>,
}

fn overlap_policy(config: Option<&PipelineConfig>, mode: Option<OverlapMode>, min_shared: Option<usize>) -> anyhow::Result<OverlapPolicy> {
    let mut policy = config.map(|c| c.overlap).unwrap_or_default();
    if let Some(m) = mode {
        policy.mode = m;
    }
    if let Some(n) = min_shared {
        policy.min_shared_chars = n;
    }
    policy.check()?;
    Ok(policy)
}

pub fn split(opts: SplitOptions) -> anyhow::Result<()> {
    let config = load_optional(opts.config.as_deref())?;
    let policy = overlap_policy(config.as_ref(), opts.policy, opts.min_shared)?;
    let seed = opts
        .seed
        .or(config.as_ref().map(|c| c.seed))
        .ok_or_else(|| config_error("a seed is required (--seed or a config file)"))?;
    let ratios = match opts.ratios {
        Some(r) => <[f64; 3]>::try_from(r.as_slice())
            .map_err(|_| config_error(format!("--ratios needs three values, got {}", r.len())))?,
        None => config.as_ref().map(|c| c.split.ratios).unwrap_or(SplitConfig::DEFAULT_RATIOS),
    };
    let split_config = SplitConfig::new(ratios, seed)?;
    let corpus = read_corpus(&opts.input, normalization_of(config.as_ref()))?;
    let (split, report) = split_corpus(&corpus, &policy, &split_config)?;
    ensure_parent(&opts.out)?;
    write_corpus(&split, &opts.out)?;
    if let Some(path) = &opts.report {
        write_text(path, &(serde_json::to_string_pretty(&report)? + "\n"))?;
    }
    println!(
        "{} relations in {} groups: {} train, {} dev, {} test",
        report.relation_count, report.group_count, report.split_counts[0], report.split_counts[1], report.split_counts[2]
    );
    Ok(())
}

pub struct SequenceOptions {
    pub input: PathBuf,
    pub out: PathBuf,
    pub task: Option<Task>,
    pub with_direction: bool,
    pub mark_signal: bool,
    pub config: Option<PathBuf>,
}

fn scheme_of(config: Option<&PipelineConfig>, mark_signal: bool) -> MarkerScheme {
    let mut scheme = config.map(|c| c.markers.clone()).unwrap_or_default();
    scheme.mark_signal |= mark_signal;
    scheme
}

pub fn sequence(opts: SequenceOptions) -> anyhow::Result<()> {
    let config = load_optional(opts.config.as_deref())?;
    let scheme = scheme_of(config.as_ref(), opts.mark_signal);
    scheme.check()?;
    let task = opts.task.or(config.as_ref().map(|c| c.sequence.task)).unwrap_or_default();
    let with_direction = opts.with_direction || config.as_ref().is_some_and(|c| c.sequence.with_direction);
    let corpus = read_corpus(&opts.input, normalization_of(config.as_ref()))?;
    let counts = emit_task_dataset(&corpus, task, &scheme, with_direction, &opts.out)?;
    println!("{task}: {} train, {} dev, {} test", counts.train, counts.dev, counts.test);
    Ok(())
}

pub fn stats(input: &Path, format: ReportFormat, out: Option<&Path>) -> anyhow::Result<()> {
    let corpus = read_corpus_lenient(input, NormalizationPolicy::default())?;
    let report = render_report(&compute_stats(&corpus), format);
    match out {
        Some(path) => write_text(path, &report),
        None => {
            print!("{report}");
            Ok(())
        }
    }
}

pub struct RunOptions {
    pub config: PathBuf,
    pub out: Option<PathBuf>,
    pub strict: bool,
    pub policy: Option<OverlapMode>,
    pub seed: Option<u64>,
    pub task: Option<Task>,
    pub with_direction: bool,
}

pub fn run(opts: RunOptions) -> anyhow::Result<()> {
    let config = PipelineConfig::load(&opts.config)?;
    let out_dir = opts
        .out
        .clone()
        .or_else(|| config.output_dir.clone())
        .ok_or_else(|| config_error("no --out given and no output_dir in the config"))?;
    let policy = overlap_policy(Some(&config), opts.policy, None)?;
    let split_config = SplitConfig::new(config.split.ratios, opts.seed.unwrap_or(config.seed))?;
    let scheme = scheme_of(Some(&config), false);
    let task = opts.task.unwrap_or(config.sequence.task);
    let with_direction = opts.with_direction || config.sequence.with_direction;

    std::fs::create_dir_all(&out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let (corpus, skips) = convert_all(&config)?;
    write_converted(&corpus, &skips, &out_dir.join("corpus.jsonl"), opts.strict)?;

    let (split, report) = split_corpus(&corpus, &policy, &split_config)?;
    write_corpus(&split, &out_dir.join("split.jsonl"))?;
    write_text(&out_dir.join("split_report.json"), &(serde_json::to_string_pretty(&report)? + "\n"))?;

    let counts = emit_task_dataset(&split, task, &scheme, with_direction, &out_dir.join("sequences"))?;
    write_text(&out_dir.join("stats.txt"), &render_report(&compute_stats(&split), ReportFormat::Text))?;
    println!("{task}: {} train, {} dev, {} test", counts.train, counts.dev, counts.test);
    Ok(())
}
