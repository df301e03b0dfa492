//! `crest-forge`: convert, validate, split, sequence and summarize causal
//! relation corpora.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use crest_forge::{NormalizationPolicy, OverlapMode, ReportFormat, Task};

use crate::config::ConfigError;

#[derive(Debug, Parser)]
#[command(name = "crest-forge", version, about = "Causal relation corpus toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the dataset adapters from a config file and write one merged corpus.
    Convert(ConvertArgs),
    /// Check every relation of a corpus file.
    Validate(ValidateArgs),
    /// Assign train/dev/test splits without cross-split context overlap.
    Split(SplitArgs),
    /// Emit marker sequences for a task, one file per split.
    Sequence(SequenceArgs),
    /// Print corpus statistics.
    Stats(StatsArgs),
    /// Convert, split, sequence and summarize in one go.
    Run(RunArgs),
}

#[derive(Debug, Args)]
struct ConvertArgs {
    #[arg(long)]
    config: PathBuf,
    /// Corpus file; defaults to `<output_dir>/corpus.jsonl`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exit 2 when any annotation was skipped as MALFORMED.
    #[arg(long)]
    strict: bool,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    input: PathBuf,
    #[arg(long, default_value = "nfc+collapse-whitespace")]
    normalization: NormalizationPolicy,
}

#[derive(Debug, Args)]
struct SplitArgs {
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overlap mode: equality, containment or shared-substring.
    #[arg(long)]
    policy: Option<OverlapMode>,
    #[arg(long)]
    min_shared: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Three comma-separated ratios, e.g. `0.8,0.1,0.1`.
    #[arg(long, value_delimiter = ',')]
    ratios: Option<Vec<f64>>,
    /// Where to write the JSON split report.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SequenceArgs {
    input: PathBuf,
    /// Output directory for train/dev/test JSONL.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    task: Option<Task>,
    #[arg(long)]
    with_direction: bool,
    #[arg(long)]
    mark_signal: bool,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct StatsArgs {
    input: PathBuf,
    #[arg(long, default_value = "text")]
    format: ReportFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory; defaults to `output_dir` from the config.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    strict: bool,
    #[arg(long)]
    policy: Option<OverlapMode>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    task: Option<Task>,
    #[arg(long)]
    with_direction: bool,
}

fn dispatch(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Convert(a) => commands::convert(&a.config, a.out.as_deref(), a.strict),
        Command::Validate(a) => commands::validate(&a.input, a.normalization),
        Command::Split(a) => commands::split(commands::SplitOptions {
            input: a.input,
            out: a.out,
            config: a.config,
            policy: a.policy,
            min_shared: a.min_shared,
            seed: a.seed,
            ratios: a.ratios,
            report: a.report,
        }),
        Command::Sequence(a) => commands::sequence(commands::SequenceOptions {
            input: a.input,
            out: a.out,
            task: a.task,
            with_direction: a.with_direction,
            mark_signal: a.mark_signal,
            config: a.config,
        }),
        Command::Stats(a) => commands::stats(&a.input, a.format, a.out.as_deref()),
        Command::Run(a) => commands::run(commands::RunOptions {
            config: a.config,
            out: a.out,
            strict: a.strict,
            policy: a.policy,
            seed: a.seed,
            task: a.task,
            with_direction: a.with_direction,
        }),
    }
}

fn report_error(kind: &str, message: &str) {
    let body = serde_json::json!({ "error": kind, "message": message });
    eprintln!("{body}");
}

/// Exit code and error kind for a failure: 1 for configuration problems,
/// 2 for data problems.
fn classify(err: &anyhow::Error) -> (u8, &'static str) {
    for cause in err.chain() {
        if cause.downcast_ref::<ConfigError>().is_some() {
            return (1, "config");
        }
        if let Some(e) = cause.downcast_ref::<crest_forge::Error>() {
            return (if e.is_config_error() { 1 } else { 2 }, e.kind());
        }
        if let Some(e) = cause.downcast_ref::<commands::DataError>() {
            return (2, e.kind);
        }
    }
    (2, "data")
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CREST_FORGE_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            report_error("usage", e.to_string().trim_end());
            return ExitCode::from(1);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let (code, kind) = classify(&err);
            report_error(kind, &format!("{err:#}"));
            ExitCode::from(code)
        }
    }
}
