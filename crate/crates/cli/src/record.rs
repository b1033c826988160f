use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use chrono::{SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub timestamp: String,
    pub results_digest: String,
}

impl RunRecord {
    pub fn new(command: &str, parameters: BTreeMap<String, String>, results: &Value) -> Self {
        RunRecord {
            command: command.to_string(),
            parameters,
            timestamp: Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true),
            results_digest: digest(results),
        }
    }
}

/// SHA-256 of the compact JSON rendering; object keys are sorted, so equal values hash equally.
pub fn digest(value: &Value) -> String {
    let bytes = serde_json::to_vec(value).expect("JSON values always serialize");
    hex::encode(Sha256::digest(bytes))
}

/// Lookup key of a run: digest of the command name and its parameters.
pub fn run_key(command: &str, parameters: &BTreeMap<String, String>) -> String {
    digest(&serde_json::json!({ "command": command, "parameters": parameters }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub key: String,
    pub record: RunRecord,
    pub results: Value,
    pub output: String,
    pub success: bool,
}

/// Append-only JSON-lines store of finished runs.
#[derive(Debug, Clone)]
pub struct Cache {
    path: PathBuf,
}

impl Cache {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        Cache { path: path.into() }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// The latest entry stored under `key`. Unreadable lines are skipped.
    pub fn lookup(&self, key: &str) -> Result<Option<CacheEntry>> {
        let file = match File::open(&self.path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e).with_context(|| format!("opening cache {}", self.path.display())),
        };
        let mut found = None;
        for line in BufReader::new(file).lines() {
            let line = line.with_context(|| format!("reading cache {}", self.path.display()))?;
            if let Ok(entry) = serde_json::from_str::<CacheEntry>(&line) {
                if entry.key == key {
                    found = Some(entry);
                }
            }
        }
        Ok(found)
    }

    pub fn append(&self, entry: &CacheEntry) -> Result<()> {
        let mut line = serde_json::to_string(entry)?;
        line.push('\n');
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)
            .with_context(|| format!("opening cache {}", self.path.display()))?;
        file.write_all(line.as_bytes())
            .with_context(|| format!("writing cache {}", self.path.display()))
    }
}
