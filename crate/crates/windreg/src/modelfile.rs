//! Versioned JSON persistence for trained models.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use windreg_core::validation::FittedRegressor;

use crate::dataset::COLUMN_NAMES;

/// Format version written by this build; older or newer files are rejected.
pub const MODEL_FILE_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ModelFileError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("corrupt model file: {0}")]
    CorruptFile(String),
    #[error("model file version {found} is not supported (expected {MODEL_FILE_VERSION})")]
    VersionMismatch { found: u64 },
}

/// Where the model came from: enough to reproduce or sanity-check it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelMetadata {
    pub rows: usize,
    pub column_names: Vec<String>,
    pub seed: u64,
}

/// The on-disk document: format version, training metadata, and the model
/// itself under an `algorithm` tag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub version: u32,
    pub metadata: ModelMetadata,
    pub model: FittedRegressor,
}

impl ModelFile {
    /// Wraps a freshly trained model with the current version and canonical
    /// column names.
    pub fn new(model: FittedRegressor, rows: usize, seed: u64) -> Self {
        Self {
            version: MODEL_FILE_VERSION,
            metadata: ModelMetadata {
                rows,
                column_names: COLUMN_NAMES.iter().map(|name| name.to_string()).collect(),
                seed,
            },
            model,
        }
    }
}

/// Writes the model as pretty-printed JSON.
pub fn save_model(file: &ModelFile, path: impl AsRef<Path>) -> Result<(), ModelFileError> {
    let mut json = serde_json::to_string_pretty(file)
        .map_err(|e| ModelFileError::CorruptFile(e.to_string()))?;
    json.push('\n');
    fs::write(path, json)?;
    Ok(())
}

/// Reads a model file back, checking the version before the full parse and
/// the feature dimensions after it.
pub fn load_model(path: impl AsRef<Path>) -> Result<ModelFile, ModelFileError> {
    let text = fs::read_to_string(path)?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| ModelFileError::CorruptFile(e.to_string()))?;
    let version = value
        .get("version")
        .and_then(serde_json::Value::as_u64)
        .ok_or_else(|| ModelFileError::CorruptFile("missing integer `version` field".into()))?;
    if version != u64::from(MODEL_FILE_VERSION) {
        return Err(ModelFileError::VersionMismatch { found: version });
    }
    let file: ModelFile =
        serde_json::from_value(value).map_err(|e| ModelFileError::CorruptFile(e.to_string()))?;
    let features = file.model.feature_count();
    let columns = file.metadata.column_names.len();
    if features + 1 != columns {
        return Err(ModelFileError::CorruptFile(format!(
            "model expects {features} features but metadata lists {columns} columns"
        )));
    }
    Ok(file)
}
