//! Run manifests: a JSON record written next to every command's outputs with
//! enough detail to rerun the job and to diff two runs.
//!
//! Floats are rendered with the shortest decimal that parses back to the same
//! bits. Everything except the `timing` object is a deterministic function of
//! the command line and the input bytes.

use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::decompose::SolverConfig;
use crate::error::{Error, Result};
use crate::io::AlignMode;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileDigest {
    pub role: String,
    pub path: String,
    pub sha256: String,
}

impl FileDigest {
    pub fn of(role: &str, path: &Path) -> Result<Self> {
        Ok(Self {
            role: role.to_string(),
            path: path.display().to_string(),
            sha256: sha256_file(path)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub started_unix_secs: f64,
    pub wall_clock_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub format_version: u32,
    pub tool_version: String,
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<SolverConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub svt_tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub align: Option<AlignMode>,
    #[serde(default)]
    pub center: bool,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations_run: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub converged: Option<bool>,
    /// `[r_I, r_T]` for the joint solver, `[r]` for the single-matrix one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_residuals: Option<Vec<f64>>,
    /// Command-specific values (fusion weights, synthetic spec, ...).
    #[serde(default, skip_serializing_if = "serde_json::Map::is_empty")]
    pub details: serde_json::Map<String, serde_json::Value>,
    pub timing: Timing,
}

impl RunManifest {
    pub fn new(command: &str, clock: &Stopwatch) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            tool_version: crate::VERSION.to_string(),
            command: command.to_string(),
            config: None,
            svt_tau: None,
            align: None,
            center: false,
            inputs: Vec::new(),
            outputs: Vec::new(),
            iterations_run: None,
            converged: None,
            final_residuals: None,
            details: serde_json::Map::new(),
            timing: clock.timing(),
        }
    }

    pub fn detail(&mut self, key: &str, value: impl Serialize) {
        let value = serde_json::to_value(value).expect("manifest details are plain data");
        self.details.insert(key.to_string(), value);
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest is plain data");
        s.push('\n');
        s
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Config {
            path: path.into(),
            reason: e.to_string(),
        })
    }
}

/// Wall-clock start plus a monotonic timer.
pub struct Stopwatch {
    started: SystemTime,
    timer: Instant,
}

impl Stopwatch {
    pub fn start() -> Self {
        Self {
            started: SystemTime::now(),
            timer: Instant::now(),
        }
    }

    pub fn timing(&self) -> Timing {
        Timing {
            started_unix_secs: self.started.duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64()),
            wall_clock_secs: self.timer.elapsed().as_secs_f64(),
        }
    }
}

pub fn sha256_bytes(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(sha256_bytes(&bytes))
}
