//! Artifact files and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::RunError;

/// Pretty JSON with a trailing newline. Field order follows the struct definitions, so
/// equal values always give equal bytes.
pub fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>, RunError> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| RunError::Io(format!("json: {e}")))?;
    bytes.push(b'\n');
    Ok(bytes)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// The configuration after defaults and command-line overrides.
    pub resolved_config: serde_json::Value,
    /// SHA-256 over the resolved configuration and every input file.
    pub input_sha256: String,
    /// Set when the run stopped before writing every artifact.
    pub partial: bool,
    pub artifacts: Vec<String>,
    pub error: Option<String>,
    pub created_unix_seconds: u64,
}

/// Writes artifacts into one directory and keeps track of what was written.
pub struct Artifacts {
    dir: PathBuf,
    command: String,
    resolved_config: serde_json::Value,
    hasher: Sha256,
    written: Vec<String>,
}

impl Artifacts {
    pub fn new(dir: &Path, command: &str, resolved_config: serde_json::Value) -> Result<Self, RunError> {
        fs::create_dir_all(dir).map_err(|e| RunError::Io(format!("cannot create {}: {e}", dir.display())))?;
        let mut hasher = Sha256::new();
        hasher.update(serde_json::to_vec(&resolved_config).map_err(|e| RunError::Io(e.to_string()))?);
        Ok(Artifacts { dir: dir.to_path_buf(), command: command.to_string(), resolved_config, hasher, written: Vec::new() })
    }

    /// Adds an input file to the manifest hash.
    pub fn hash_input(&mut self, bytes: &[u8]) {
        self.hasher.update(bytes);
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), RunError> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).map_err(|e| RunError::Io(format!("cannot write {}: {e}", path.display())))?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), RunError> {
        let bytes = to_json(value)?;
        self.write(name, &bytes)
    }

    pub fn finish(self, error: Option<&RunError>) -> Result<Manifest, RunError> {
        let created = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let manifest = Manifest {
            tool: "leaky".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: self.command,
            resolved_config: self.resolved_config,
            input_sha256: hex::encode(self.hasher.finalize()),
            partial: error.is_some(),
            artifacts: self.written,
            error: error.map(|e| e.to_string()),
            created_unix_seconds: created,
        };
        let bytes = to_json(&manifest)?;
        let path = self.dir.join("manifest.json");
        fs::write(&path, bytes).map_err(|e| RunError::Io(format!("cannot write {}: {e}", path.display())))?;
        Ok(manifest)
    }
}

/// CSV text from a header and rows, one line each.
pub fn csv(header: &str, rows: impl IntoIterator<Item = String>) -> Vec<u8> {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row);
        out.push('\n');
    }
    out.into_bytes()
}
