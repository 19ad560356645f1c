//! File formats: JSON documents with an isolated timestamp, point lists and
//! numeric tables as CSV with 17 significant digits.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use fekete_core::{Complex64, Point};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// A JSON output file. `generated_at_unix` is the only field that differs
/// between reruns with the same seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Document<T> {
    pub generated_at_unix: u64,
    #[serde(flatten)]
    pub body: T,
}

impl<T> Document<T> {
    pub fn now(body: T) -> Self {
        let secs = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        Document {
            generated_at_unix: secs,
            body,
        }
    }
}

pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Header plus rows of floats; missing values are written as `NaN`.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|x| fmt_float(*x)).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    pub fn from_csv(text: &str) -> CliResult<Self> {
        let mut lines = text.lines();
        let header: Vec<String> = lines
            .next()
            .ok_or_else(|| CliError::Config("empty table".into()))?
            .split(',')
            .map(str::to_owned)
            .collect();
        let mut rows = Vec::new();
        for (i, line) in lines.filter(|l| !l.is_empty()).enumerate() {
            let row: Vec<f64> = line
                .split(',')
                .map(|c| {
                    c.parse::<f64>()
                        .map_err(|e| CliError::Config(format!("row {i}: {e}: {c}")))
                })
                .collect::<CliResult<_>>()?;
            if row.len() != header.len() {
                return Err(CliError::Config(format!(
                    "row {i} has {} cells, header has {}",
                    row.len(),
                    header.len()
                )));
            }
            rows.push(row);
        }
        Ok(Table { header, rows })
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }
}

/// One row per point with columns `re_1, im_1, ..., re_n, im_n`.
pub fn points_table(points: &[Point]) -> Table {
    let n = points.first().map_or(0, Point::dim);
    let names: Vec<String> = (1..=n)
        .flat_map(|i| [format!("re_{i}"), format!("im_{i}")])
        .collect();
    let header: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut t = Table::new(&header);
    for p in points {
        t.push(p.0.iter().flat_map(|z| [z.re, z.im]).collect());
    }
    t
}

pub fn points_from_table(t: &Table) -> Vec<Point> {
    t.rows
        .iter()
        .map(|r| Point(r.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect()))
        .collect()
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

pub fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

pub fn write_json<T: Serialize>(path: &Path, body: T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(&Document::now(body)).expect("outputs serialize");
    write_text(path, &(text + "\n"))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<Document<T>> {
    serde_json::from_str(&read_text(path)?)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn ensure_dir(dir: &Path) -> CliResult<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_owned(),
        source,
    })?;
    Ok(dir.to_owned())
}
