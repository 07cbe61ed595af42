use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::io::write_json;
use crate::CliError;

/// Provenance of one command invocation. Timestamps live only here, so every
/// other artifact is reproducible byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: String,
    /// SHA-256 of the effective configuration in canonical JSON.
    pub config_hash: String,
    pub seeds: Vec<u64>,
    pub started_at: DateTime<Utc>,
    pub finished_at: DateTime<Utc>,
    /// Artifacts written, relative to the output directory.
    pub artifacts: Vec<PathBuf>,
}

/// Hash of `config` serialized with sorted keys and no whitespace.
pub fn config_hash<T: Serialize>(config: &T) -> String {
    // serde_json's default map is ordered by key, so going through `Value`
    // canonicalizes field order.
    let value = serde_json::to_value(config).expect("config serializes");
    let bytes = serde_json::to_vec(&value).expect("value serializes");
    hex::encode(Sha256::digest(bytes))
}

impl RunManifest {
    pub fn start<T: Serialize>(command: &str, config: &T, seeds: Vec<u64>) -> Self {
        let now = Utc::now();
        Self {
            command: command.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: config_hash(config),
            seeds,
            started_at: now,
            finished_at: now,
            artifacts: Vec::new(),
        }
    }

    pub fn record(&mut self, out: &Path, path: &Path) {
        let rel = path.strip_prefix(out).unwrap_or(path).to_path_buf();
        if !self.artifacts.contains(&rel) {
            self.artifacts.push(rel);
        }
    }

    pub fn finish(mut self, out: &Path) -> Result<PathBuf, CliError> {
        self.finished_at = Utc::now();
        let path = out.join("manifest.json");
        write_json(&path, &self)?;
        Ok(path)
    }
}
