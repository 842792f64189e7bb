//! Output files and the run manifest.

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Formats a float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// A CSV table with a fixed header.
#[derive(Clone, Debug)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self { name: name.into(), header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn with_header(name: &str, header: Vec<String>) -> Self {
        Self { name: name.into(), header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(&self.header).map_err(io)?;
        for r in &self.rows {
            w.write_record(r).map_err(io)?;
        }
        w.into_inner().map_err(|e| Error::Io(e.to_string()))
    }
}

/// Everything a subcommand produces.
#[derive(Debug)]
pub struct CommandOutput {
    pub tables: Vec<Table>,
    pub report: Value,
    /// Outcome of the acceptance tolerances for `--check`.
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct OutputFile {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config_digest: String,
    pub seed: u64,
    pub tool_version: String,
    /// Seconds; the only field that differs between identical runs.
    pub wall_time: f64,
    pub pass: bool,
    pub outputs: Vec<OutputFile>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn write(dir: &Path, name: &str, bytes: &[u8]) -> Result<OutputFile> {
    let path: PathBuf = dir.join(name);
    std::fs::write(&path, bytes).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(OutputFile { path: name.into(), sha256: sha256_hex(bytes) })
}

/// Writes the tables, `report.json` and `manifest.json` into `dir`.
pub fn write_outputs(
    dir: &Path,
    command: &str,
    config: &Value,
    seed: u64,
    out: &CommandOutput,
    wall_time: f64,
) -> Result<RunManifest> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let mut outputs = Vec::new();
    for t in &out.tables {
        outputs.push(write(dir, &format!("{}.csv", t.name), &t.to_bytes()?)?);
    }
    let report = serde_json::to_vec_pretty(&out.report).map_err(|e| Error::Io(e.to_string()))?;
    outputs.push(write(dir, "report.json", &report)?);
    let config_bytes = serde_json::to_vec(config).map_err(|e| Error::Io(e.to_string()))?;
    let manifest = RunManifest {
        command: command.into(),
        config_digest: sha256_hex(&config_bytes),
        seed,
        tool_version: env!("CARGO_PKG_VERSION").into(),
        wall_time,
        pass: out.pass,
        outputs,
    };
    let bytes = serde_json::to_vec_pretty(&manifest).map_err(|e| Error::Io(e.to_string()))?;
    write(dir, "manifest.json", &bytes)?;
    Ok(manifest)
}
