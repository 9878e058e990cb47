use std::io;
use std::path::{Path, PathBuf};

use dindex_core::classify::ClassifyError;
use dindex_core::oracle::OracleError;
use dindex_core::synth::SynthError;
use dindex_core::{CorpusError, EngineError, MetricsError};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: u64, message: String },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error("config: {0}")]
    Config(String),
    #[error("missing {what}; run `dindex {command}` first")]
    MissingPrerequisite { what: String, command: &'static str },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("oracle mismatch on {mismatches} of {cells} cells")]
    OracleMismatch { mismatches: u64, cells: u64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub fn io(path: &Path) -> impl FnOnce(io::Error) -> Error + '_ {
        move |source| Error::Io { path: path.to_path_buf(), source }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::Io { .. } => "io",
            Error::Parse { .. } => "parse",
            Error::Format { .. } => "format",
            Error::Config(_) => "config",
            Error::MissingPrerequisite { .. } => "missing_prerequisite",
            Error::Corpus(_) => "corpus",
            Error::Engine(_) => "engine",
            Error::Metrics(_) => "metrics",
            Error::Classify(_) => "classify",
            Error::Synth(_) => "synth",
            Error::Oracle(_) => "oracle",
            Error::OracleMismatch { .. } => "oracle_mismatch",
        }
    }

    /// 2 for bad input, 3 for a missing earlier step, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::Format { .. } | Error::Config(_) | Error::Corpus(_) | Error::Synth(_) => 2,
            Error::MissingPrerequisite { .. } => 3,
            _ => 1,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::json!({
            "error": self.kind(),
            "message": self.to_string(),
            "exit_code": self.exit_code(),
        });
        if let Error::Parse { path, line, .. } = self {
            v["path"] = path.display().to_string().into();
            v["line"] = (*line).into();
        }
        v
    }
}
