//! CSV tables and the JSON report on disk.

use std::fs;
use std::path::Path;

use crate::error::{CliError, Result};
use crate::report::RunReport;

pub const SUMMARY_FILE: &str = "summary.json";

/// One CSV file: header row and pre-formatted cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub file: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// Shortest representation that parses back to the same `f64`.
pub fn num(v: f64) -> String {
    format!("{v}")
}

impl Table {
    pub fn new(file: &str, header: &[&str]) -> Self {
        Self {
            file: file.into(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: &[f64]) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row.iter().copied().map(num).collect());
    }

    pub fn push_cells(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let path = dir.join(&self.file);
        let shown = path.display().to_string();
        let csv_err = |source| CliError::Csv {
            path: shown.clone(),
            source,
        };
        let mut w = csv::Writer::from_path(&path).map_err(csv_err)?;
        w.write_record(&self.header).map_err(csv_err)?;
        for r in &self.rows {
            w.write_record(r).map_err(csv_err)?;
        }
        w.flush().map_err(|e| CliError::io(shown.clone(), e))
    }
}

/// Writes the tables, then the report listing them; returns the manifest.
pub fn write_outputs(report: &mut RunReport, tables: &[Table], dir: &Path) -> Result<Vec<String>> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir.display().to_string(), e))?;
    report.files.clear();
    for t in tables {
        t.write(dir)?;
        report.files.push(t.file.clone());
    }
    report.files.push(SUMMARY_FILE.into());
    let path = dir.join(SUMMARY_FILE);
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    fs::write(&path, text).map_err(|e| CliError::io(path.display().to_string(), e))?;
    Ok(report.files.clone())
}
