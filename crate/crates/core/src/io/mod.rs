//! File formats: edge lists, TU graph-classification datasets, embedding
//! tables, synthetic datasets, and model checkpoints.
//!
//! Every format has a `parse_*` function over in-memory text that never
//! panics on malformed input, plus thin path-based wrappers.

pub mod edgelist;
pub mod embedding;
pub mod json;
pub mod tu;

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::GraphError;

pub use edgelist::{load_edge_list, parse_edge_list, save_edge_list, write_edge_list, EdgeList};
pub use embedding::{
    embedding_csv, embedding_json, parse_embedding_csv, parse_embedding_json, EmbeddingFile,
};
pub use json::{
    checkpoint_json, dataset_json, parse_checkpoint_json, parse_dataset_json, DatasetFile,
};
pub use tu::{load_tu_dataset, parse_tu_dataset, TuDataset, TuFiles};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IoError {
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("no edges or nodes in input")]
    Empty,
    #[error("missing file {0}")]
    MissingFile(PathBuf),
    #[error("inconsistent graph indicator: {0}")]
    InconsistentIndicator(String),
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("invalid content: {0}")]
    Invalid(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

impl From<serde_json::Error> for IoError {
    fn from(e: serde_json::Error) -> Self {
        IoError::Json(e.to_string())
    }
}

pub fn read_text(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            IoError::MissingFile(path.to_path_buf())
        } else {
            IoError::Io {
                path: path.to_path_buf(),
                message: e.to_string(),
            }
        }
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<(), IoError> {
    std::fs::write(path, text).map_err(|e| IoError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Enough to rerun a command and get the same bytes back.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunProvenance {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: Option<u64>,
    /// Command options as given, after defaults were applied.
    pub options: serde_json::Value,
    /// SHA-256 of the input graph's sorted edge list, when there is one.
    pub input_hash: Option<String>,
}

impl RunProvenance {
    pub fn new(command: &str, seed: Option<u64>, options: serde_json::Value) -> Self {
        Self {
            tool: "vnestruct".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            seed,
            options,
            input_hash: None,
        }
    }
}

/// `<path>.provenance.json`, written next to outputs whose own format has
/// no room for metadata.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".provenance.json");
    path.with_file_name(name)
}
