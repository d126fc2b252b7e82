//! Event CSV files and the simulation sidecar.
//!
//! Event files hold a single `time` column, one value per line, written with
//! 17 significant digits so they read back bit-exactly.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::ExpHawkesParams;
use crate::simulate::{RngSeed, StopCriterion};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
}

impl IoError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        IoError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub(crate) fn csv(path: &Path, source: csv::Error) -> Self {
        IoError::Csv {
            path: path.to_path_buf(),
            source,
        }
    }

    pub(crate) fn json(path: &Path, source: serde_json::Error) -> Self {
        IoError::Json {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// Formats a float with 17 significant digits.
pub fn format_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        // `inf`, `-inf` and `NaN` parse back with `str::parse::<f64>`
        v.to_string()
    }
}

pub fn write_events_csv(path: &Path, times: &[f64]) -> Result<(), IoError> {
    let file = File::create(path).map_err(|e| IoError::io(path, e))?;
    let mut out = BufWriter::new(file);
    let mut write = || -> std::io::Result<()> {
        out.write_all(b"time\n")?;
        for &t in times {
            writeln!(out, "{}", format_f64(t))?;
        }
        out.flush()
    };
    write().map_err(|e| IoError::io(path, e))
}

/// Reads an events file. Ordering and positivity are not checked here.
pub fn read_events_csv(path: &Path) -> Result<Vec<f64>, IoError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| IoError::csv(path, e))?;
    let headers = reader.headers().map_err(|e| IoError::csv(path, e))?;
    if headers.len() != 1 || &headers[0] != "time" {
        return Err(IoError::Format {
            path: path.to_path_buf(),
            message: format!("expected a single `time` column, found {headers:?}"),
        });
    }
    let mut times = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| IoError::csv(path, e))?;
        let field = &record[0];
        let value: f64 = field.parse().map_err(|_| IoError::Format {
            path: path.to_path_buf(),
            message: format!("line {}: `{field}` is not a number", line + 2),
        })?;
        times.push(value);
    }
    Ok(times)
}

/// Metadata written next to a simulated events file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSidecar {
    pub params: ExpHawkesParams,
    pub seed: RngSeed,
    pub stop: StopCriterion,
    pub horizon: f64,
    pub n_events: usize,
}

/// `events.csv` -> `events.json`.
pub fn sidecar_path(events_path: &Path) -> PathBuf {
    events_path.with_extension("json")
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    let file = File::create(path).map_err(|e| IoError::io(path, e))?;
    let mut out = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| IoError::json(path, e))?;
    out.write_all(b"\n")
        .and_then(|_| out.flush())
        .map_err(|e| IoError::io(path, e))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, IoError> {
    let file = File::open(path).map_err(|e| IoError::io(path, e))?;
    serde_json::from_reader(std::io::BufReader::new(file)).map_err(|e| IoError::json(path, e))
}
