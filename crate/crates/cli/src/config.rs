//! Pipeline configuration file (TOML).
//!
//! ```toml
//! seed = 13
//! output_dir = "out"
//!
//! [[datasets]]
//! dataset_id = 8
//! adapter = "copa"
//! inputs = ["data/copa"]
//!
//! [overlap]
//! mode = "containment"
//!
//! [split]
//! ratios = [0.8, 0.1, 0.1]
//!
//! [sequence]
//! task = "direction"
//! ```
//!
//! Relative paths are resolved against the directory holding the file.

use std::collections::HashSet;
use std::fmt;
use std::path::{Path, PathBuf};

use crest_forge::adapters::adapter_by_name;
use crest_forge::{MarkerScheme, NormalizationPolicy, OverlapPolicy, SplitConfig, Task};
use serde::Deserialize;

/// A problem with the configuration or the command line (exit code 1).
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn config_error(message: impl Into<String>) -> anyhow::Error {
    ConfigError(message.into()).into()
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetEntry {
    pub dataset_id: u32,
    pub adapter: String,
    pub inputs: Vec<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitSection {
    pub ratios: [f64; 3],
}

impl Default for SplitSection {
    fn default() -> Self {
        SplitSection {
            ratios: SplitConfig::DEFAULT_RATIOS,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SequenceSection {
    pub task: Task,
    pub with_direction: bool,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub normalization: NormalizationPolicy,
    #[serde(default)]
    pub datasets: Vec<DatasetEntry>,
    #[serde(default)]
    pub overlap: OverlapPolicy,
    #[serde(default)]
    pub split: SplitSection,
    #[serde(default)]
    pub markers: MarkerScheme,
    #[serde(default)]
    pub sequence: SequenceSection,
}

impl PipelineConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_error(format!("cannot read config {}: {e}", path.display())))?;
        let mut config = Self::parse(&text).map_err(|e| config_error(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        config.resolve(base);
        config.check()?;
        Ok(config)
    }

    pub fn parse(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    fn resolve(&mut self, base: &Path) {
        let join = |p: &PathBuf| if p.is_absolute() { p.clone() } else { base.join(p) };
        for entry in &mut self.datasets {
            entry.inputs = entry.inputs.iter().map(join).collect();
        }
        self.output_dir = self.output_dir.as_ref().map(join);
    }

    /// Checks every invariant before any work starts.
    pub fn check(&self) -> anyhow::Result<()> {
        let mut ids = HashSet::new();
        let mut paths = HashSet::new();
        for entry in &self.datasets {
            let adapter = adapter_by_name(&entry.adapter).map_err(|e| config_error(e.to_string()))?;
            if adapter.dataset_id != entry.dataset_id {
                return Err(config_error(format!(
                    "adapter `{}` produces dataset id {}, not {}",
                    entry.adapter, adapter.dataset_id, entry.dataset_id
                )));
            }
            if !ids.insert(entry.dataset_id) {
                return Err(config_error(format!("dataset id {} listed twice", entry.dataset_id)));
            }
            if entry.inputs.is_empty() {
                return Err(config_error(format!("dataset {} has no inputs", entry.dataset_id)));
            }
            for p in &entry.inputs {
                if !paths.insert(p.clone()) {
                    return Err(config_error(format!("input path {} listed twice", p.display())));
                }
            }
        }
        self.overlap.check().map_err(|e| config_error(e.to_string()))?;
        self.split_config().map_err(|e| config_error(e.to_string()))?;
        self.markers.check().map_err(|e| config_error(e.to_string()))?;
        Ok(())
    }

    pub fn split_config(&self) -> crest_forge::Result<SplitConfig> {
        SplitConfig::new(self.split.ratios, self.seed)
    }

    /// Datasets in ascending id order.
    pub fn datasets_by_id(&self) -> Vec<&DatasetEntry> {
        let mut v: Vec<&DatasetEntry> = self.datasets.iter().collect();
        v.sort_by_key(|d| d.dataset_id);
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crest_forge::OverlapMode;

    const FULL: &str = r#"
seed = 7
output_dir = "out"

[[datasets]]
dataset_id = 8
adapter = "copa"
inputs = ["copa"]

[[datasets]]
dataset_id = 2
adapter = "semeval2010"
inputs = ["semeval"]

[overlap]
mode = "shared-substring"
min_shared_chars = 40

[split]
ratios = [0.7, 0.15, 0.15]

[markers]
mark_signal = true

[sequence]
task = "pair"
with_direction = true
"#;

    #[test]
    fn parses_every_section() {
        let mut c = PipelineConfig::parse(FULL).unwrap();
        c.resolve(Path::new("/base"));
        c.check().unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.overlap.mode, OverlapMode::SharedSubstring);
        assert_eq!(c.overlap.min_shared_chars, 40);
        assert_eq!(c.split.ratios, [0.7, 0.15, 0.15]);
        assert!(c.markers.mark_signal);
        assert_eq!(c.markers.span1_open, "[unused1]");
        assert_eq!(c.sequence.task, Task::Pair);
        assert_eq!(c.datasets[0].inputs, vec![PathBuf::from("/base/copa")]);
        let ids: Vec<u32> = c.datasets_by_id().iter().map(|d| d.dataset_id).collect();
        assert_eq!(ids, vec![2, 8]);
    }

    #[test]
    fn readme_example_parses() {
        let readme = include_str!("../../../README.md");
        let block = readme.split("```toml\n").nth(1).unwrap().split("```").next().unwrap();
        let c = PipelineConfig::parse(block).unwrap();
        c.check().unwrap();
        assert_eq!(c.markers, MarkerScheme::default());
        assert_eq!(c.datasets.len(), 2);
    }

    #[test]
    fn seed_is_required() {
        assert!(PipelineConfig::parse("output_dir = \"x\"").is_err());
        let c = PipelineConfig::parse("seed = 1").unwrap();
        assert_eq!(c.overlap, OverlapPolicy::default());
    }

    #[test]
    fn rejects_bad_entries() {
        let bad = [
            "seed = 1\n[[datasets]]\ndataset_id = 3\nadapter = \"copa\"\ninputs = [\"a\"]",
            "seed = 1\n[[datasets]]\ndataset_id = 8\nadapter = \"nope\"\ninputs = [\"a\"]",
            "seed = 1\n[[datasets]]\ndataset_id = 8\nadapter = \"copa\"\ninputs = []",
            "seed = 1\n[[datasets]]\ndataset_id = 8\nadapter = \"copa\"\ninputs = [\"a\"]\n[[datasets]]\ndataset_id = 2\nadapter = \"semeval2010\"\ninputs = [\"a\"]",
            "seed = 1\n[split]\nratios = [0.5, 0.1, 0.1]",
            "seed = 1\n[overlap]\nmin_shared_chars = 0",
        ];
        for text in bad {
            let c = PipelineConfig::parse(text).unwrap();
            assert!(c.check().is_err(), "{text}");
        }
        assert!(PipelineConfig::parse("seed = 1\nunknown = 2").is_err());
    }
}
