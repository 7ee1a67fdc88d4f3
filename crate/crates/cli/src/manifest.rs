//! Run manifests written next to every output.

use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use nemev::{Error, Result};

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub version: &'static str,
    /// SHA-256 of the config in canonical form (keys sorted, comments dropped).
    pub config_sha256: String,
    pub seed: u64,
    /// RFC 3339, taken from `SOURCE_DATE_EPOCH` when set.
    pub timestamp: String,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(subcommand: &str, config_text: &str, seed: u64, outputs: Vec<String>) -> Result<Self> {
        Ok(RunManifest {
            subcommand: subcommand.to_string(),
            version: env!("CARGO_PKG_VERSION"),
            config_sha256: config_digest(config_text)?,
            seed,
            timestamp: timestamp(),
            outputs,
        })
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))?;
        std::fs::write(dir.join("manifest.json"), text + "\n")?;
        Ok(())
    }
}

/// Digest of the config that ignores key order, whitespace and comments.
pub fn config_digest(text: &str) -> Result<String> {
    let table: toml::Table = toml::from_str(text).map_err(|e| Error::Parse {
        line: e.span().map(|s| text[..s.start].matches('\n').count() + 1).unwrap_or(0),
        message: e.message().trim().to_string(),
    })?;
    // serde_json maps are ordered by key, which fixes the serialization.
    let canonical = serde_json::to_string(&table).map_err(|e| Error::Io(e.to_string()))?;
    Ok(hex::encode(Sha256::digest(canonical.as_bytes())))
}

fn timestamp() -> String {
    let secs = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse::<i64>().ok())
        .unwrap_or_else(|| chrono::Utc::now().timestamp());
    chrono::DateTime::from_timestamp(secs, 0)
        .unwrap_or_default()
        .to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}
