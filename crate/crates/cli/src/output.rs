//! Artifact writers. CSV files carry the provenance as a leading `#` comment
//! line; JSON documents nest it under `"provenance"`.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::{CliError, Result};

#[derive(clap::ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

pub fn comment_header(provenance: &serde_json::Value) -> String {
    format!("# provenance {provenance}\n")
}

pub fn json_doc(provenance: &serde_json::Value, result: &impl Serialize) -> Result<Vec<u8>> {
    let doc = serde_json::json!({ "provenance": provenance, "result": result });
    let mut bytes = serde_json::to_vec_pretty(&doc).map_err(|e| CliError::Input(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// A table with a fixed column order. The header row is written explicitly so
/// an empty table still has one.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<serde_json::Value>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn render(&self, format: Format, provenance: &serde_json::Value) -> Result<Vec<u8>> {
        match format {
            Format::Csv => {
                let mut w = csv::WriterBuilder::new().from_writer(comment_header(provenance).into_bytes());
                let csv_err = |e: csv::Error| CliError::Input(e.to_string());
                w.write_record(&self.header).map_err(csv_err)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(cell)).map_err(csv_err)?;
                }
                w.into_inner().map_err(|e| CliError::Input(e.to_string()))
            }
            Format::Json => {
                let objects: Vec<serde_json::Map<String, serde_json::Value>> =
                    self.rows.iter().map(|r| self.header.iter().cloned().zip(r.iter().cloned()).collect()).collect();
                json_doc(provenance, &objects)
            }
        }
    }
}

fn cell(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s.clone(),
        serde_json::Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// Writes to `out`, or to stdout when no path is given.
pub fn emit(out: Option<&Path>, stdout: &mut dyn Write, bytes: &[u8]) -> Result<()> {
    match out {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(p, bytes)?;
        }
        None => stdout.write_all(bytes)?,
    }
    Ok(())
}

pub fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}
