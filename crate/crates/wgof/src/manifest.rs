//! Run manifests: what was run, with which settings, and digests of every
//! file written.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct OutputDigest {
    pub path: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command_line: Vec<String>,
    pub config: serde_json::Value,
    pub seeds: Vec<u64>,
    pub started_unix: f64,
    pub finished_unix: Option<f64>,
    pub outputs: Vec<OutputDigest>,
    pub notes: Vec<String>,
}

fn now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Collects output files of one run and writes them under `dir`.
#[derive(Debug)]
pub struct RunRecorder {
    dir: PathBuf,
    manifest: RunManifest,
}

impl RunRecorder {
    pub fn new(dir: impl Into<PathBuf>, command_line: Vec<String>, config: serde_json::Value, seeds: Vec<u64>) -> Self {
        Self {
            dir: dir.into(),
            manifest: RunManifest {
                tool: env!("CARGO_PKG_NAME"),
                version: env!("CARGO_PKG_VERSION"),
                command_line,
                config,
                seeds,
                started_unix: now(),
                finished_unix: None,
                outputs: Vec::new(),
                notes: Vec::new(),
            },
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.manifest.notes.push(s.into());
    }

    /// Writes `bytes` to `dir/name` and records its digest.
    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        fs::create_dir_all(&self.dir).map_err(|e| Error::io(&self.dir, e))?;
        let path = self.dir.join(name);
        fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        self.manifest.outputs.push(OutputDigest {
            path: name.to_string(),
            bytes: bytes.len(),
            sha256: sha256_hex(bytes),
        });
        Ok(path)
    }

    /// Writes `<command>.manifest.json` and returns the manifest.
    pub fn finish(mut self, command: &str) -> Result<RunManifest> {
        self.manifest.finished_unix = Some(now());
        fs::create_dir_all(&self.dir).map_err(|e| Error::io(&self.dir, e))?;
        let path = self.dir.join(format!("{command}.manifest.json"));
        let json = serde_json::to_vec_pretty(&self.manifest)?;
        fs::write(&path, json).map_err(|e| Error::io(&path, e))?;
        Ok(self.manifest)
    }
}

/// Checks every recorded digest against the files on disk; returns the
/// names that differ or are missing.
pub fn verify(dir: &Path, manifest: &RunManifest) -> Vec<String> {
    manifest
        .outputs
        .iter()
        .filter(|o| match fs::read(dir.join(&o.path)) {
            Ok(b) => sha256_hex(&b) != o.sha256,
            Err(_) => true,
        })
        .map(|o| o.path.clone())
        .collect()
}
