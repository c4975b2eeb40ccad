//! CSV tables and the JSON summary written for a run.

use std::io::Write;
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

use super::run::ReportBundle;
use crate::error::{GceError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum TableCell {
    Float(f64),
    Int(i64),
    Text(String),
}

impl TableCell {
    /// Floats carry 17 significant digits so values survive a text round trip.
    pub fn render(&self) -> String {
        match self {
            TableCell::Float(v) => format!("{v:.16e}"),
            TableCell::Int(v) => v.to_string(),
            TableCell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for TableCell {
    fn from(v: f64) -> Self {
        TableCell::Float(v)
    }
}

impl From<usize> for TableCell {
    fn from(v: usize) -> Self {
        TableCell::Int(v as i64)
    }
}

impl From<&str> for TableCell {
    fn from(v: &str) -> Self {
        TableCell::Text(v.into())
    }
}

/// One CSV file: a header row plus rows of equal width.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<TableCell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: &[&str]) -> Self {
        Self {
            name: name.into(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<TableCell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let wrap = |e: csv::Error| GceError::InvalidArgument(format!("table {}: {e}", self.name));
        w.write_record(&self.header).map_err(wrap)?;
        for row in &self.rows {
            w.write_record(row.iter().map(TableCell::render)).map_err(wrap)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| GceError::InvalidArgument(format!("table {}: {e}", self.name)))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }
}

fn write_atomic(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    let mut tmp = NamedTempFile::new_in(dir).map_err(|e| GceError::io(dir, e))?;
    tmp.write_all(contents.as_bytes()).map_err(|e| GceError::io(&path, e))?;
    tmp.persist(&path).map_err(|e| GceError::io(&path, e.error))?;
    Ok(path)
}

/// Writes one `<table>.csv` per table and `summary.json` into `out_dir`, creating it
/// if needed. Each file is written to a temporary name and renamed into place.
pub fn write_reports(bundle: &ReportBundle, out_dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = out_dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| GceError::io(dir, e))?;
    let mut written = Vec::with_capacity(bundle.tables.len() + 1);
    for table in &bundle.tables {
        written.push(write_atomic(dir, &format!("{}.csv", table.name), &table.to_csv()?)?);
    }
    written.push(write_atomic(dir, "summary.json", &bundle.summary_json()?)?);
    Ok(written)
}
