use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use crate::args::Format;
use crate::CliError;

/// A numeric table with a metadata header.
pub struct Table {
    pub metadata: Value,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(u64),
    Real(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Real(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as u64)
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

/// 17 significant digits; parsing the text back gives the same double.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Real(x) => format_real(*x),
            Cell::Text(s) => s.clone(),
        }
    }
}

pub fn open(out: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path).map_err(CliError::io)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn metadata(command: &str, fields: Value) -> Value {
    let mut meta = json!({ "command": command, "version": env!("CARGO_PKG_VERSION") });
    if let (Some(m), Value::Object(extra)) = (meta.as_object_mut(), fields) {
        m.extend(extra);
    }
    meta
}

impl Table {
    pub fn write(&self, format: Format, out: Option<&Path>) -> Result<(), CliError> {
        let mut w = open(out)?;
        match format {
            Format::Csv => {
                writeln!(w, "# {}", self.metadata).map_err(CliError::io)?;
                writeln!(w, "{}", self.columns.join(",")).map_err(CliError::io)?;
                for row in &self.rows {
                    let line: Vec<String> = row.iter().map(Cell::csv).collect();
                    writeln!(w, "{}", line.join(",")).map_err(CliError::io)?;
                }
            }
            Format::Json => {
                let doc = json!({ "metadata": self.metadata, "columns": self.columns, "rows": self.rows });
                serde_json::to_writer(&mut w, &doc).map_err(|e| CliError::Io(e.to_string()))?;
                writeln!(w).map_err(CliError::io)?;
            }
        }
        w.flush().map_err(CliError::io)
    }
}

/// Metadata and rows of a CSV file written by [`Table::write`].
pub fn read_csv(path: &Path) -> Result<(Value, Vec<Vec<f64>>), CliError> {
    let text = std::fs::read_to_string(path).map_err(CliError::io)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .and_then(|l| l.strip_prefix("# "))
        .ok_or_else(|| CliError::Usage(format!("{} has no metadata line", path.display())))?;
    let metadata: Value =
        serde_json::from_str(header).map_err(|e| CliError::Usage(format!("bad metadata line: {e}")))?;
    lines.next();
    let rows = lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| crate::args::parse_list(l, "sample row"))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((metadata, rows))
}
