//! In-memory result tables and the artifact writer.

use std::fs;
use std::path::{Path, PathBuf};

use wrs_core::paths::fmt_full;
use wrs_core::CSV_VERSION_LINE;

use crate::error::CliError;

/// A CSV table kept in memory until the whole run has succeeded.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// A CSV cell.
pub enum Cell {
    Int(u64),
    Real(f64),
    Text(String),
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl Cell {
    fn render(self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) => fmt_full(v),
            Cell::Text(v) => v,
        }
    }
}

#[macro_export]
macro_rules! row {
    ($($cell:expr),* $(,)?) => {
        vec![$($crate::output::Cell::from($cell)),*]
    };
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, cells: Vec<Cell>) {
        debug_assert_eq!(cells.len(), self.header.len());
        self.rows.push(cells.into_iter().map(Cell::render).collect());
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut buf = format!("{CSV_VERSION_LINE}\n").into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(&self.header)
                .map_err(|e| CliError::Output(e.to_string()))?;
            for r in &self.rows {
                w.write_record(r).map_err(|e| CliError::Output(e.to_string()))?;
            }
            w.flush().map_err(|e| CliError::Output(e.to_string()))?;
        }
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }
}

/// Everything an experiment produces.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifacts {
    pub per_replica: Table,
    pub aggregate: Table,
    pub summary: Vec<String>,
    pub pass: bool,
}

pub const PER_REPLICA: &str = "per_replica.csv";
pub const AGGREGATE: &str = "aggregate.csv";
pub const SUMMARY: &str = "summary.txt";
pub const MANIFEST: &str = "manifest.toml";

pub fn summary_text(artifacts: &Artifacts) -> String {
    let mut s = artifacts.summary.join("\n");
    s.push_str(if artifacts.pass {
        "\nresult: PASS\n"
    } else {
        "\nresult: FAIL\n"
    });
    s
}

/// Writes all artifacts into `dir`. If any write fails the files written so far are removed.
pub fn write_artifacts(dir: &Path, artifacts: &Artifacts, manifest: &str) -> Result<(), CliError> {
    let files = [
        (PER_REPLICA, artifacts.per_replica.to_csv()?),
        (AGGREGATE, artifacts.aggregate.to_csv()?),
        (SUMMARY, summary_text(artifacts)),
        (MANIFEST, manifest.to_string()),
    ];
    let created_dir = !dir.exists();
    fs::create_dir_all(dir).map_err(|e| CliError::Output(format!("cannot create {}: {e}", dir.display())))?;
    let mut written: Vec<PathBuf> = Vec::new();
    for (name, content) in &files {
        let path = dir.join(name);
        if let Err(e) = fs::write(&path, content) {
            for p in &written {
                let _ = fs::remove_file(p);
            }
            if created_dir {
                let _ = fs::remove_dir(dir);
            }
            return Err(CliError::Output(format!("cannot write {}: {e}", path.display())));
        }
        written.push(path);
    }
    Ok(())
}
