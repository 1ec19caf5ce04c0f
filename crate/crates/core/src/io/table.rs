use std::path::Path;

use crate::error::{Error, Result};

/// One CSV field.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => fmt_f64(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<i64> for Cell {
    fn from(i: i64) -> Self {
        Cell::Int(i)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

/// 17 significant digits; enough to round-trip any double.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// A CSV file: a comment line with tool version and config hash, a header
/// row, then data rows.
#[derive(Clone, Debug)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Self {
        Self { columns: columns.iter().map(|s| s.as_ref().to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn to_csv(&self, version: &str, config_hash: &str) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).expect("in-memory write");
        }
        let body = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields");
        format!("# hapto {version} config {config_hash}\n{body}")
    }

    pub fn write(&self, path: &Path, version: &str, config_hash: &str) -> Result<()> {
        std::fs::write(path, self.to_csv(version, config_hash))?;
        Ok(())
    }

    /// Parses what `to_csv` wrote; cells come back as text.
    pub fn parse(text: &str) -> Result<(String, Vec<String>, Vec<Vec<String>>)> {
        let (comment, body) = text.split_once('\n').ok_or_else(|| Error::InvalidParams("empty CSV".into()))?;
        if !comment.starts_with('#') {
            return Err(Error::InvalidParams("CSV lacks the comment line".into()));
        }
        let mut r = csv::Reader::from_reader(body.as_bytes());
        let header = r.headers().map_err(|e| Error::InvalidParams(e.to_string()))?.iter().map(String::from).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            rows.push(rec.map_err(|e| Error::InvalidParams(e.to_string()))?.iter().map(String::from).collect());
        }
        Ok((comment.to_string(), header, rows))
    }
}
