//! Re-run frozen CSV baselines and compare column by column.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::error::{HarnessError, Result};
use crate::experiments;
use crate::table::{self, Cell, Table};

/// Absolute tolerance per column, with a fallback for unlisted columns.
#[derive(Debug, Clone)]
pub struct Tolerances {
    pub default: f64,
    pub per_column: BTreeMap<String, f64>,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            default: 1e-10,
            per_column: BTreeMap::new(),
        }
    }
}

impl Tolerances {
    pub fn for_column(&self, name: &str) -> f64 {
        self.per_column.get(name).copied().unwrap_or(self.default)
    }

    /// `column=value`
    pub fn add(&mut self, spec: &str) -> Result<()> {
        let (col, v) = spec
            .split_once('=')
            .ok_or_else(|| HarnessError::Config(format!("tolerance `{spec}` (expected column=value)")))?;
        let v: f64 = v
            .parse()
            .ok()
            .filter(|v: &f64| *v >= 0.0)
            .ok_or_else(|| HarnessError::Config(format!("tolerance `{spec}` needs a value >= 0")))?;
        self.per_column.insert(col.to_owned(), v);
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct FileOutcome {
    pub path: PathBuf,
    pub mismatches: Vec<String>,
}

impl FileOutcome {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

pub fn compare(fresh: &Table, frozen: &Table, tol: &Tolerances) -> Vec<String> {
    let mut out = Vec::new();
    if fresh.columns != frozen.columns {
        out.push(format!("columns {:?} != baseline {:?}", fresh.columns, frozen.columns));
        return out;
    }
    if fresh.rows.len() != frozen.rows.len() {
        out.push(format!("{} rows != baseline {}", fresh.rows.len(), frozen.rows.len()));
        return out;
    }
    for (i, (a, b)) in fresh.rows.iter().zip(&frozen.rows).enumerate() {
        for (c, (x, y)) in a.iter().zip(b).enumerate() {
            let name = &fresh.columns[c];
            let ok = match (as_f64(x), as_f64(y)) {
                (Some(p), Some(q)) => (p - q).abs() <= tol.for_column(name) || (p.is_nan() && q.is_nan()),
                _ => x.to_string() == y.to_string(),
            };
            if !ok {
                out.push(format!("row {i}, column {name}: {x} vs baseline {y}"));
            }
        }
    }
    out
}

fn as_f64(c: &Cell) -> Option<f64> {
    match c {
        Cell::Num(v) => Some(*v),
        Cell::Int(v) => Some(*v as f64),
        _ => None,
    }
}

pub fn check_file(path: &Path, tol: &Tolerances) -> Result<FileOutcome> {
    let stored = table::read_csv(std::fs::File::open(path)?)?;
    let fresh = experiments::run(&stored.config)?;
    let mismatches = match fresh.tables.iter().find(|t| t.name == stored.table.name) {
        Some(t) => compare(t, &stored.table, tol),
        None => vec![format!("run produced no `{}` table", stored.table.name)],
    };
    Ok(FileOutcome {
        path: path.to_owned(),
        mismatches,
    })
}

/// Every `*.csv` directly inside `dir`, in name order.
pub fn check_dir(dir: &Path, tol: &Tolerances) -> Result<Vec<FileOutcome>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(HarnessError::Config(format!("no .csv baselines in {}", dir.display())));
    }
    paths.iter().map(|p| check_file(p, tol)).collect()
}
