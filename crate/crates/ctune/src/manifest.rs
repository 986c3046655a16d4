//! Run manifests and output directories.
//!
//! Every command writes its files through an [`OutputDir`], which hashes
//! each artifact and finishes by writing `manifest.json`. Timings and the
//! start/finish timestamps are the only content left out of the hashes, so
//! identical runs produce identical hashes.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::dataset::sha256_hex;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Effective configuration after flags, config file and defaults.
    pub config: serde_json::Value,
    pub corpus_hash: String,
    /// SHA-256 of every reproducible output file.
    pub artifact_hashes: BTreeMap<String, String>,
    /// Output files whose content varies between runs (wall-clock timings).
    pub unhashed: Vec<String>,
    pub tool_version: String,
    pub started: DateTime<Utc>,
    pub finished: DateTime<Utc>,
}

impl RunManifest {
    /// The manifest without its timestamps, as canonical JSON. Two runs
    /// with equal flags and inputs agree on this.
    pub fn hashed_content(&self) -> String {
        let mut v = serde_json::to_value(self).expect("manifest serializes");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("started");
            obj.remove("finished");
        }
        v.to_string()
    }

    pub fn load(dir: &Path) -> std::io::Result<Self> {
        let text = fs::read_to_string(dir.join(MANIFEST_FILE))?;
        serde_json::from_str(&text).map_err(std::io::Error::other)
    }
}

/// Collects a command's outputs and writes the manifest last.
pub struct OutputDir {
    dir: PathBuf,
    started: DateTime<Utc>,
    hashes: BTreeMap<String, String>,
    unhashed: Vec<String>,
}

impl OutputDir {
    pub fn create(dir: &Path) -> std::io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            started: Utc::now(),
            hashes: BTreeMap::new(),
            unhashed: Vec::new(),
        })
    }

    pub fn path(&self) -> &Path {
        &self.dir
    }

    /// Writes a reproducible artifact and records its hash.
    pub fn write(&mut self, name: &str, bytes: &[u8]) -> std::io::Result<()> {
        fs::write(self.dir.join(name), bytes)?;
        self.hashes.insert(name.to_string(), sha256_hex(bytes));
        Ok(())
    }

    /// Writes a file that is excluded from hashing.
    pub fn write_unhashed(&mut self, name: &str, bytes: &[u8]) -> std::io::Result<()> {
        fs::write(self.dir.join(name), bytes)?;
        if !self.unhashed.iter().any(|n| n == name) {
            self.unhashed.push(name.to_string());
        }
        Ok(())
    }

    pub fn finish(
        self,
        command: &str,
        config: serde_json::Value,
        corpus_hash: &str,
    ) -> std::io::Result<RunManifest> {
        let manifest = RunManifest {
            command: command.to_string(),
            config,
            corpus_hash: corpus_hash.to_string(),
            artifact_hashes: self.hashes,
            unhashed: self.unhashed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            started: self.started,
            finished: Utc::now(),
        };
        let mut text = serde_json::to_string_pretty(&manifest).map_err(std::io::Error::other)?;
        text.push('\n');
        fs::write(self.dir.join(MANIFEST_FILE), text)?;
        Ok(manifest)
    }
}
