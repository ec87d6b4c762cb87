//! CSV tables and JSON reports.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{bad, CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

/// Shortest representation that parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

/// A rectangular table written with a header row and LF line endings.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push_numbers(&mut self, row: impl IntoIterator<Item = f64>) {
        self.push(row.into_iter().map(fmt_f64).collect());
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_bytes(&self) -> CliResult<Vec<u8>> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        let to_err = |e: csv::Error| bad(format!("csv encoding failed: {e}"));
        w.write_record(&self.header).map_err(to_err)?;
        for row in &self.rows {
            w.write_record(row).map_err(to_err)?;
        }
        w.into_inner().map_err(|e| bad(format!("csv encoding failed: {e}")))
    }
}

/// Where a run's artifacts go.
#[derive(Debug, Clone, Default)]
pub struct Sinks {
    pub json: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    /// Print the CSV table instead of the JSON report on stdout.
    pub csv_to_stdout: bool,
}

fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    std::fs::write(path, bytes).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn json_bytes<R: Serialize>(report: &R) -> CliResult<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(report).map_err(|e| bad(format!("json encoding failed: {e}")))?;
    bytes.push(b'\n');
    Ok(bytes)
}

impl Sinks {
    pub fn emit<R: Serialize>(&self, report: &R, table: Option<&Table>) -> CliResult<()> {
        let json = json_bytes(report)?;
        if let Some(p) = &self.json {
            write_file(p, &json)?;
        }
        let csv = table.map(Table::to_bytes).transpose()?;
        if let (Some(p), Some(bytes)) = (&self.csv, &csv) {
            write_file(p, bytes)?;
        }
        let stdout_bytes =
            if self.csv_to_stdout { csv.ok_or_else(|| bad("this subcommand produces no CSV table"))? } else { json };
        let mut out = std::io::stdout().lock();
        out.write_all(&stdout_bytes)
            .and_then(|_| out.flush())
            .map_err(|source| CliError::Io { path: "stdout".into(), source })
    }
}
