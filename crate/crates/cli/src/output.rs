use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::config::{Format, RunConfig};
use crate::error::CliError;

/// A flat table for CSV output.
#[derive(Debug, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// What a subcommand produced. `verified` is false when a check it ran
/// came out wrong.
pub struct Outcome {
    pub json: Value,
    pub table: Table,
    pub verified: bool,
}

#[derive(Serialize)]
struct Report<'a> {
    config: &'a RunConfig,
    result: &'a Value,
}

pub fn render(config: &RunConfig, outcome: &Outcome, format: Format) -> Result<Vec<u8>, CliError> {
    match format {
        Format::Json => {
            let mut bytes = serde_json::to_vec_pretty(&Report {
                config,
                result: &outcome.json,
            })?;
            bytes.push(b'\n');
            Ok(bytes)
        }
        Format::Csv => {
            let mut bytes = format!("# config: {}\n", serde_json::to_string(config)?).into_bytes();
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(&mut bytes);
            w.write_record(&outcome.table.header)?;
            for row in &outcome.table.rows {
                w.write_record(row)?;
            }
            w.flush()?;
            drop(w);
            Ok(bytes)
        }
    }
}

/// Explicit `--out`, else `<out_dir>/<subcommand>.<ext>`, else standard output.
pub fn destination(
    out: Option<&Path>,
    out_dir: Option<&Path>,
    subcommand: &str,
    format: Format,
) -> Option<PathBuf> {
    out.map(Path::to_path_buf)
        .or_else(|| out_dir.map(|d| d.join(format!("{subcommand}.{}", format.extension()))))
}

pub fn emit(bytes: &[u8], path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => {
            if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
            }
            fs::write(p, bytes).map_err(|e| CliError::io(p, e))
        }
        None => {
            let mut out = io::stdout().lock();
            out.write_all(bytes)
                .and_then(|()| out.flush())
                .map_err(|e| CliError::io(Path::new("<stdout>"), e))
        }
    }
}
