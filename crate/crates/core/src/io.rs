//! Point set and coloring ingestion/emission (CSV and JSON array-of-arrays).

use std::path::Path;

use crate::error::{Error, Result};
use crate::space::{Coloring, PointSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Csv,
        }
    }
}

/// Parses CSV with one vector per row. A first row that does not parse as
/// numbers is treated as a header.
pub fn parse_csv(text: &str) -> Result<PointSet> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse(e.to_string()))?;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> =
            record.iter().map(|f| f.parse::<f64>()).collect();
        match parsed {
            Ok(row) => rows.push(row),
            Err(_) if line == 0 => continue,
            Err(e) => {
                return Err(Error::Parse(format!("row {}: {e}", line + 1)));
            }
        }
    }
    if rows.is_empty() {
        return Err(Error::Parse("no numeric rows".into()));
    }
    PointSet::new(rows).map_err(|e| match e {
        Error::LengthMismatch { expected, got } => {
            Error::Parse(format!("ragged rows: expected {expected} columns, got {got}"))
        }
        other => other,
    })
}

pub fn parse_json(text: &str) -> Result<PointSet> {
    let rows: Vec<Vec<f64>> =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    PointSet::new(rows)
}

pub fn read_point_set(path: &Path) -> Result<(PointSet, Format)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let fmt = Format::from_path(path);
    let set = match fmt {
        Format::Csv => parse_csv(&text)?,
        Format::Json => parse_json(&text)?,
    };
    Ok((set, fmt))
}

/// Shortest round-tripping representation.
fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

pub fn to_csv(t: &PointSet) -> String {
    let mut out = String::new();
    for p in t.iter() {
        let row: Vec<String> = p.iter().map(|&x| fmt_f64(x)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn to_json(t: &PointSet) -> String {
    serde_json::to_string(&t.to_rows()).expect("finite floats serialize")
}

pub fn emit(t: &PointSet, fmt: Format) -> String {
    match fmt {
        Format::Csv => to_csv(t),
        Format::Json => to_json(t),
    }
}

/// One sign per row.
pub fn coloring_to_csv(c: &Coloring) -> String {
    let mut out = String::new();
    for e in c.entries() {
        out.push_str(&e.to_string());
        out.push('\n');
    }
    out
}

pub fn coloring_from_csv(text: &str) -> Result<Coloring> {
    let entries: Result<Vec<i8>> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|l| l.parse::<i8>().map_err(|e| Error::Parse(format!("{l:?}: {e}"))))
        .collect();
    Coloring::new(entries?)
}
