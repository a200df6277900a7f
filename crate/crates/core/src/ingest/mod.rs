//! File inputs: PCM WAV audio, interval annotations (TSV) and analysis
//! configuration (`key=value`).

mod annotation;
mod config;
mod wav;

use std::path::Path;

use thiserror::Error;

pub use annotation::{durations, Annotation, Interval, Tier, DEFAULT_EXCLUDE};
pub use config::{load_config, parse_config};
pub use wav::{load_wav, read_wav, write_wav};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IngestError {
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
    #[error("unsupported audio format: {0}")]
    UnsupportedFormat(String),
    #[error("corrupt audio file: {0}")]
    CorruptFile(String),
    #[error("audio is silent after mixdown")]
    DegenerateAudio,
    #[error("line {line}: {msg}")]
    ParseError { line: usize, msg: String },
    #[error("tier `{tier}`: interval {index} overlaps its predecessor")]
    OverlapError { tier: String, index: usize },
    #[error("no tier named `{0}`")]
    TierNotFound(String),
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: bad value `{value}` for `{key}`: {msg}")]
    BadValue {
        line: usize,
        key: String,
        value: String,
        msg: String,
    },
}

impl IngestError {
    pub fn name(&self) -> &'static str {
        match self {
            IngestError::Io { .. } => "IoError",
            IngestError::UnsupportedFormat(_) => "UnsupportedFormat",
            IngestError::CorruptFile(_) => "CorruptFile",
            IngestError::DegenerateAudio => "DegenerateAudio",
            IngestError::ParseError { .. } => "ParseError",
            IngestError::OverlapError { .. } => "OverlapError",
            IngestError::TierNotFound(_) => "TierNotFound",
            IngestError::UnknownKey { .. } => "UnknownKey",
            IngestError::BadValue { .. } => "BadValue",
        }
    }

    pub(crate) fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        IngestError::Io {
            path: path.display().to_string(),
            msg: e.to_string(),
        }
    }
}
