//! CSV tables and their manifests.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;

use crate::{CliError, Params};

/// 17 significant digits, round-trip exact.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let mut text = self.header.join(",");
        text.push('\n');
        for row in &self.rows {
            text.push_str(&row.join(","));
            text.push('\n');
        }
        write_file(path, text.as_bytes())
    }
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let mut f = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    f.write_all(bytes).map_err(|e| CliError::io(path, e))
}

#[derive(Serialize)]
pub struct Manifest<'a> {
    pub command: &'a str,
    pub version: &'a str,
    pub output: String,
    pub zero_table: String,
    pub zero_table_coverage: f64,
    pub wall_seconds: f64,
    pub rows: usize,
    pub notes: Vec<String>,
    pub config: toml::Table,
}

pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.toml");
    output.with_file_name(name)
}

pub struct RunInfo<'a> {
    pub command: &'a str,
    pub params: &'a Params,
    pub table: Option<&'a etadense::ZeroTable>,
    pub elapsed: Duration,
}

pub fn write_manifest(info: &RunInfo, output: &Path, rows: usize, notes: Vec<String>) -> Result<(), CliError> {
    let (label, coverage) = match info.table {
        Some(t) => (t.source_label().to_string(), t.coverage()),
        None => ("none".to_string(), 0.0),
    };
    let manifest = Manifest {
        command: info.command,
        version: env!("CARGO_PKG_VERSION"),
        output: output.display().to_string(),
        zero_table: label,
        zero_table_coverage: coverage,
        wall_seconds: info.elapsed.as_secs_f64(),
        rows,
        notes,
        config: info.params.snapshot(),
    };
    let text = toml::to_string(&manifest).map_err(|e| CliError::Validation(e.to_string()))?;
    write_file(&manifest_path(output), text.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_digits() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn manifest_sits_beside_output() {
        assert_eq!(manifest_path(Path::new("/tmp/run/eval.csv")), Path::new("/tmp/run/eval.csv.manifest.toml"));
    }
}
