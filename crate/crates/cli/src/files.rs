//! Multi-record SHL1 files and their JSON sidecars.

use std::fs;
use std::io::{BufWriter, Cursor, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use shiftlab::families::FamilySpec;
use shiftlab::io::{read_shl1, write_shl1};
use shiftlab::GridFunction;

/// Describes the records of a SHL1 file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Sidecar {
    pub spec: Option<FamilySpec>,
    pub k_min: i32,
    pub records: usize,
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    with_suffix(path, ".json")
}

pub fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

pub fn read_records(path: &Path) -> Result<Vec<GridFunction>> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let total = bytes.len() as u64;
    let mut cursor = Cursor::new(bytes);
    let mut out = Vec::new();
    while cursor.position() < total {
        let f = read_shl1(&mut cursor).with_context(|| format!("record {} of {}", out.len(), path.display()))?;
        out.push(f);
    }
    anyhow::ensure!(!out.is_empty(), "{} holds no records", path.display());
    Ok(out)
}

pub fn write_records(path: &Path, records: &[GridFunction]) -> Result<()> {
    let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut out = BufWriter::new(file);
    for f in records {
        write_shl1(&mut out, f)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_sidecar(path: &Path) -> Result<Option<Sidecar>> {
    let side = sidecar_path(path);
    if !side.exists() {
        return Ok(None);
    }
    let text = fs::read_to_string(&side)?;
    Ok(Some(serde_json::from_str(&text).with_context(|| format!("parsing {}", side.display()))?))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}
