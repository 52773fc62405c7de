//! Run manifests: what was run, on what, producing which bytes.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliResult, StageExt};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub tool_version: String,
    pub command_line: Vec<String>,
    pub seeds: Vec<u64>,
    pub threads: usize,
    /// Input path to sha256.
    pub inputs: BTreeMap<String, String>,
    /// Output path, relative to the manifest, to sha256.
    pub outputs: BTreeMap<String, String>,
    /// Wall-clock seconds per stage.
    pub timing: BTreeMap<String, f64>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn sha256_file(path: &Path) -> CliResult<String> {
    Ok(sha256_hex(&fs::read(path).stage("manifest")?))
}

/// Collects a manifest while a command runs.
pub struct Recorder {
    manifest: RunManifest,
    root: PathBuf,
    started: Instant,
}

impl Recorder {
    pub fn new(root: impl Into<PathBuf>, command_line: Vec<String>, threads: usize) -> Self {
        Recorder {
            manifest: RunManifest {
                tool: env!("CARGO_PKG_NAME").into(),
                tool_version: env!("CARGO_PKG_VERSION").into(),
                command_line,
                seeds: Vec::new(),
                threads,
                inputs: BTreeMap::new(),
                outputs: BTreeMap::new(),
                timing: BTreeMap::new(),
            },
            root: root.into(),
            started: Instant::now(),
        }
    }

    pub fn seed(&mut self, seed: u64) {
        if !self.manifest.seeds.contains(&seed) {
            self.manifest.seeds.push(seed);
        }
    }

    pub fn input(&mut self, path: &Path) -> CliResult<()> {
        let hash = sha256_file(path)?;
        self.manifest.inputs.insert(path.display().to_string(), hash);
        Ok(())
    }

    /// Writes `bytes` under the root and records their hash.
    pub fn write(&mut self, rel: impl AsRef<Path>, bytes: impl AsRef<[u8]>) -> CliResult<()> {
        let rel = rel.as_ref();
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).stage("write")?;
        }
        fs::write(&path, bytes.as_ref()).stage("write")?;
        let key = rel.to_string_lossy().replace('\\', "/");
        self.manifest.outputs.insert(key, sha256_hex(bytes.as_ref()));
        Ok(())
    }

    /// Runs `f` and records its duration under `stage`.
    pub fn time<T>(&mut self, stage: &str, f: impl FnOnce(&mut Self) -> CliResult<T>) -> CliResult<T> {
        let t0 = Instant::now();
        let out = f(self);
        *self.manifest.timing.entry(stage.into()).or_insert(0.0) += t0.elapsed().as_secs_f64();
        out
    }

    /// Writes the manifest to `name` under the root.
    pub fn finish(mut self, name: &str) -> CliResult<RunManifest> {
        self.manifest.timing.insert("total".into(), self.started.elapsed().as_secs_f64());
        let json = landskew::io::to_json_string(&self.manifest).stage("manifest")?;
        let path = self.root.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).stage("manifest")?;
        }
        fs::write(path, json).stage("manifest")?;
        Ok(self.manifest)
    }
}
