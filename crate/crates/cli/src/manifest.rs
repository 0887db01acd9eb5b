//! Per-run manifest written next to the outputs.

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::Result;
use serde::Serialize;
use serde_json::Value;

use crate::files::write_json;

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub argv: Vec<String>,
    pub parameters: Value,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub started_unix: u64,
    pub wall_seconds: f64,
    pub extra: Value,
}

pub struct RunClock {
    started: Instant,
    started_unix: u64,
}

impl RunClock {
    pub fn start() -> Self {
        let started_unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        RunClock { started: Instant::now(), started_unix }
    }

    pub fn manifest(
        &self,
        command: &str,
        parameters: Value,
        inputs: Vec<PathBuf>,
        outputs: Vec<PathBuf>,
        extra: Value,
    ) -> Manifest {
        Manifest {
            tool: "shiftlab",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            argv: std::env::args().collect(),
            parameters,
            inputs,
            outputs,
            started_unix: self.started_unix,
            wall_seconds: self.started.elapsed().as_secs_f64(),
            extra,
        }
    }
}

pub fn write_manifest(path: &Path, manifest: &Manifest) -> Result<()> {
    write_json(path, manifest)
}
