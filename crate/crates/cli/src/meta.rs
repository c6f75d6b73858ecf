//! `run.meta.json`: enough to re-execute a run and to check its inputs.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use diagscope::{Error, Result};

pub const META_FILE: &str = "run.meta.json";

#[derive(Debug, Serialize)]
pub struct RunMeta {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub command_line: Vec<String>,
    /// Effective options after merging the config file and flags.
    pub config: Value,
    pub config_hash: String,
    /// Input file → SHA-256.
    pub inputs: BTreeMap<String, String>,
    pub seed: Option<u64>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn files_under(root: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    let entries = fs::read_dir(root).map_err(|e| Error::io(root, e))?;
    for entry in entries {
        let path = entry.map_err(|e| Error::io(root, e))?.path();
        if path.is_dir() {
            files_under(&path, out)?;
        } else {
            out.push(path);
        }
    }
    Ok(())
}

/// Hashes a file, or every file below a directory.
pub fn hash_inputs(paths: &[&Path]) -> Result<BTreeMap<String, String>> {
    let mut files = Vec::new();
    for p in paths {
        if p.is_dir() {
            files_under(p, &mut files)?;
        } else {
            files.push(p.to_path_buf());
        }
    }
    let mut out = BTreeMap::new();
    for f in files {
        let bytes = fs::read(&f).map_err(|e| Error::io(&f, e))?;
        out.insert(f.to_string_lossy().replace('\\', "/"), sha256_hex(&bytes));
    }
    Ok(out)
}

impl RunMeta {
    pub fn new(command: &str, command_line: Vec<String>, config: Value, inputs: &[&Path], seed: Option<u64>) -> Result<Self> {
        let config_hash = sha256_hex(serde_json::to_string(&config).expect("json value serializes").as_bytes());
        Ok(Self {
            tool: "diagscope",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            command_line,
            config,
            config_hash,
            inputs: hash_inputs(inputs)?,
            seed,
        })
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let path = dir.join(META_FILE);
        let mut text = serde_json::to_string_pretty(self).expect("metadata serializes");
        text.push('\n');
        fs::write(&path, text).map_err(|e| Error::io(&path, e))
    }
}
