//! Artifact collection, output directory writing and the manifest.

use std::fs;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::Error;

pub const MANIFEST: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ManifestEntry {
    pub name: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Manifest {
    pub command: String,
    pub artifacts: Vec<ManifestEntry>,
}

/// Everything a command produces; `summary` goes to stdout when no output
/// directory is given.
#[derive(Clone, Debug, Default)]
pub struct Outputs {
    pub artifacts: Vec<Artifact>,
    pub summary: serde_json::Value,
}

impl Outputs {
    pub fn push(&mut self, name: impl Into<String>, bytes: Vec<u8>) {
        self.artifacts.push(Artifact { name: name.into(), bytes });
    }

    pub fn push_json<T: Serialize>(&mut self, name: &str, value: &T) {
        self.push(name, to_json_bytes(value));
    }

    pub fn get(&self, name: &str) -> Option<&[u8]> {
        self.artifacts.iter().find(|a| a.name == name).map(|a| a.bytes.as_slice())
    }
}

pub fn to_json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut v = serde_json::to_vec_pretty(value).expect("reports serialize");
    v.push(b'\n');
    v
}

/// Serializes rows to CSV with a header row and LF line endings.
pub fn csv_bytes<T: Serialize>(rows: &[T], header: &[&str]) -> Result<Vec<u8>, Error> {
    let mut w = csv::WriterBuilder::new().has_headers(!rows.is_empty()).from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record(header).map_err(|e| Error::Schema(e.to_string()))?;
    }
    for r in rows {
        w.serialize(r).map_err(|e| Error::Schema(e.to_string()))?;
    }
    w.into_inner().map_err(|e| Error::Schema(e.to_string()))
}

pub fn manifest(command: &str, artifacts: &[Artifact]) -> Manifest {
    let mut entries: Vec<ManifestEntry> = artifacts
        .iter()
        .map(|a| ManifestEntry { name: a.name.clone(), bytes: a.bytes.len(), sha256: hex::encode(Sha256::digest(&a.bytes)) })
        .collect();
    entries.sort_by(|a, b| a.name.cmp(&b.name));
    Manifest { command: command.to_string(), artifacts: entries }
}

/// Writes every artifact into `dir` (created if needed), then the manifest.
pub fn write_dir(dir: &Path, command: &str, artifacts: &[Artifact]) -> Result<Manifest, Error> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir.display(), e))?;
    for a in artifacts {
        let path = dir.join(&a.name);
        fs::write(&path, &a.bytes).map_err(|e| Error::io(path.display(), e))?;
    }
    let m = manifest(command, artifacts);
    let path = dir.join(MANIFEST);
    fs::write(&path, to_json_bytes(&m)).map_err(|e| Error::io(path.display(), e))?;
    Ok(m)
}
