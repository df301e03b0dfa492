//! Unify causal-relation datasets into one schema, split them without
//! context leakage, and turn relations into marker sequences.

pub mod adapters;
pub mod context;
pub mod error;
pub mod io;
pub mod model;
pub mod sequence;
pub mod splitter;
pub mod stats;
pub mod text;

pub use adapters::{parse_with_adapter, registry, AdapterSpec, ParseOutput, SkipReason, SkipRecord};
pub use error::{Error, Result};
pub use model::{validate_relation, Corpus, CrestRelation, IssueCode, TokenSpan, ValidationReport};
pub use sequence::{to_sequence, MarkedSequence, MarkerScheme, Task};
pub use splitter::{OverlapMode, OverlapNormalization, OverlapPartition, OverlapPolicy, SplitConfig};
pub use stats::{compute_stats, render_report, CorpusStats, ReportFormat};
pub use text::NormalizationPolicy;
