use std::path::PathBuf;

use thiserror::Error;

use crate::model::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: malformed record: {message}")]
    MalformedLine { line: usize, message: String },

    #[error("line {line}: invalid relation `{original_id}`: {report}")]
    InvalidRecord {
        line: usize,
        original_id: String,
        report: ValidationReport,
    },

    #[error("line {line}: duplicate original_id `{original_id}`")]
    DuplicateId { line: usize, original_id: String },

    #[error("no adapter registered for dataset id {0}")]
    UnknownDataset(u32),

    #[error("no adapter named `{0}`")]
    UnknownAdapter(String),

    #[error("{path}: {message}")]
    Source { path: PathBuf, message: String },

    #[error("split ratios must be non-negative and sum to 1, got {0:?}")]
    BadRatios([f64; 3]),

    #[error("overlap policy: {0}")]
    BadPolicy(String),

    #[error("{0} relation(s) have no split assigned")]
    UnassignedSplit(usize),

    #[error("split audit found {0} overlapping cross-split pair(s)")]
    AuditFailed(usize),

    #[error("relation `{original_id}`: {message}")]
    Sequence { original_id: String, message: String },

    #[error("marker scheme: {0}")]
    BadMarkers(String),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Short machine-readable kind, used by the CLI's error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Io { .. } => "io",
            Error::MalformedLine { .. } => "malformed_line",
            Error::InvalidRecord { .. } => "invalid_record",
            Error::DuplicateId { .. } => "duplicate_id",
            Error::UnknownDataset(_) => "unknown_dataset",
            Error::UnknownAdapter(_) => "unknown_adapter",
            Error::Source { .. } => "source",
            Error::BadRatios(_) => "bad_ratios",
            Error::BadPolicy(_) => "bad_policy",
            Error::UnassignedSplit(_) => "unassigned_split",
            Error::AuditFailed(_) => "audit_failed",
            Error::Sequence { .. } => "sequence",
            Error::BadMarkers(_) => "bad_markers",
            Error::Json(_) => "json",
        }
    }

    /// True for errors caused by configuration rather than by data.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::UnknownDataset(_)
                | Error::UnknownAdapter(_)
                | Error::BadRatios(_)
                | Error::BadPolicy(_)
                | Error::BadMarkers(_)
        )
    }
}
