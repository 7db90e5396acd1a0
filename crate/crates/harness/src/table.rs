//! In-memory result tables and their CSV form.
//!
//! Every file starts with `#` lines naming the table and embedding the full
//! experiment config, followed by an ordinary header row and data rows.
//! Floats are written as `{:.16e}`, which round-trips `f64` exactly and keeps
//! files byte-stable across runs.

use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};

const CONFIG_PREFIX: &str = "# config: ";
const TABLE_PREFIX: &str = "# table: ";

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Num(v) => write!(f, "{v:.16e}"),
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Text(s) => f.write_str(s),
            Cell::Empty => Ok(()),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.to_owned(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width for table {}", self.name);
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric view of a column; text and empty cells become NaN.
    pub fn numbers(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column(name)?;
        Some(
            self.rows
                .iter()
                .map(|r| match &r[i] {
                    Cell::Num(v) => *v,
                    Cell::Int(v) => *v as f64,
                    _ => f64::NAN,
                })
                .collect(),
        )
    }

    pub fn write_csv(&self, config: &ExperimentConfig, out: impl Write) -> Result<()> {
        let mut out = out;
        writeln!(out, "# fgrid {}", env!("CARGO_PKG_VERSION"))?;
        writeln!(out, "{TABLE_PREFIX}{}", self.name)?;
        writeln!(out, "{CONFIG_PREFIX}{}", config.to_text())?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self, config: &ExperimentConfig) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(config, &mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    pub fn save(&self, config: &ExperimentConfig, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string(config)?)?;
        Ok(())
    }
}

/// A table read back from disk with its provenance.
#[derive(Debug, Clone)]
pub struct StoredTable {
    pub config: ExperimentConfig,
    pub table: Table,
}

pub fn read_csv(mut input: impl Read) -> Result<StoredTable> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let meta = |prefix: &str| {
        text.lines()
            .take_while(|l| l.starts_with('#'))
            .find_map(|l| l.strip_prefix(prefix))
            .map(str::to_owned)
    };
    let name = meta(TABLE_PREFIX)
        .ok_or_else(|| HarnessError::Config("csv lacks a `# table:` header line".into()))?;
    let config = ExperimentConfig::from_text(
        &meta(CONFIG_PREFIX)
            .ok_or_else(|| HarnessError::Config("csv lacks a `# config:` header line".into()))?,
    )?;
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let columns: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    let mut table = Table {
        name,
        columns,
        rows: Vec::new(),
    };
    for record in reader.records() {
        let record = record?;
        table.rows.push(record.iter().map(parse_cell).collect());
    }
    Ok(StoredTable { config, table })
}

fn parse_cell(s: &str) -> Cell {
    if s.is_empty() {
        Cell::Empty
    } else if let Ok(i) = s.parse::<i64>() {
        Cell::Int(i)
    } else if let Ok(v) = s.parse::<f64>() {
        Cell::Num(v)
    } else {
        Cell::Text(s.to_owned())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Command;

    #[test]
    fn csv_round_trip_is_exact() {
        let cfg = ExperimentConfig::new(Command::Reconstruct);
        let mut t = Table::new("field", &["x", "value", "label", "gap"]);
        t.push(vec![Cell::Num(0.1), Cell::Num(-1.0 / 3.0), "a,b".into(), Cell::Empty]);
        t.push(vec![Cell::Num(5e-324), Cell::Num(1e300), "plain".into(), Cell::Int(-4)]);
        let text = t.to_csv_string(&cfg).unwrap();
        assert!(text.starts_with("# fgrid "));
        let back = read_csv(text.as_bytes()).unwrap();
        assert_eq!(back.config, cfg);
        assert_eq!(back.table, t);
    }

    #[test]
    fn missing_header_is_config_error() {
        let err = read_csv("x,y\n1,2\n".as_bytes()).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
