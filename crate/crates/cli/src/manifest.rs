// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! Run manifests: what was run, on which inputs, with which parameters.

use std::collections::BTreeMap;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub command_line: Vec<String>,
    /// Non-path parameters; these feed the digest.
    pub parameters: BTreeMap<String, String>,
    pub seeds: Vec<u64>,
    pub threads: usize,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    /// Covers version, command, parameters, seeds and input contents. Thread
    /// count, paths and timings are excluded.
    pub digest: String,
    pub status: String,
    pub wall_clock_ms: u128,
    pub peak_rss_kb: Option<u64>,
}

pub fn sha256_file(path: &Path) -> Result<String, CliError> {
    let mut file = fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = file.read(&mut buf).map_err(|e| CliError::io(path, e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex(&hasher.finalize()))
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Peak resident set size of this process, from `/proc/self/status`.
pub fn peak_rss_kb() -> Option<u64> {
    let status = fs::read_to_string("/proc/self/status").ok()?;
    status
        .lines()
        .find(|l| l.starts_with("VmHWM:"))
        .and_then(|l| l.split_whitespace().nth(1))
        .and_then(|v| v.parse().ok())
}

/// Collects manifest fields while a command runs.
pub struct ManifestBuilder {
    command: String,
    parameters: BTreeMap<String, String>,
    seeds: Vec<u64>,
    inputs: Vec<FileDigest>,
    outputs: Vec<PathBuf>,
    started: Instant,
    threads: usize,
}

impl ManifestBuilder {
    pub fn new(command: &str, threads: usize) -> Self {
        ManifestBuilder {
            command: command.to_string(),
            parameters: BTreeMap::new(),
            seeds: Vec::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            started: Instant::now(),
            threads,
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }

    pub fn seed(&mut self, seed: u64) -> &mut Self {
        self.seeds.push(seed);
        self
    }

    pub fn input(&mut self, path: &Path) -> Result<&mut Self, CliError> {
        let sha256 = sha256_file(path)?;
        self.inputs.push(FileDigest {
            path: path.display().to_string(),
            sha256,
        });
        Ok(self)
    }

    pub fn output(&mut self, path: &Path) {
        self.outputs.push(path.to_path_buf());
    }

    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        let canonical = serde_json::json!({
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "parameters": self.parameters,
            "seeds": self.seeds,
            "inputs": self.inputs.iter().map(|i| &i.sha256).collect::<Vec<_>>(),
        });
        hasher.update(canonical.to_string().as_bytes());
        hex(&hasher.finalize()[..16])
    }

    /// Comment line placed at the top of CSV outputs.
    pub fn stamp(&self) -> String {
        format!("manifest_digest={}", self.digest())
    }

    pub fn finish(&self, status: &str) -> RunManifest {
        let outputs = self
            .outputs
            .iter()
            .filter(|p| p.exists())
            .map(|p| FileDigest {
                path: p.display().to_string(),
                sha256: sha256_file(p).unwrap_or_default(),
            })
            .collect();
        RunManifest {
            tool: "corecrest".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: self.command.clone(),
            command_line: std::env::args().collect(),
            parameters: self.parameters.clone(),
            seeds: self.seeds.clone(),
            threads: self.threads,
            inputs: self.inputs.clone(),
            outputs,
            digest: self.digest(),
            status: status.to_string(),
            wall_clock_ms: self.started.elapsed().as_millis(),
            peak_rss_kb: peak_rss_kb(),
        }
    }

    pub fn write(&self, path: &Path, status: &str) -> Result<(), CliError> {
        let manifest = self.finish(status);
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
    }
}
