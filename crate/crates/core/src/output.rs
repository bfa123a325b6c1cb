//! CSV and JSON artifacts.
//!
//! Floating-point values are written with 17 significant digits, enough to
//! read back every `f64` exactly. Files are assembled in memory, written in
//! one go and identified by the SHA-256 of their bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::analysis::{Plateau, PowerLawFit, SweepParameter, SweepTable};
use crate::ensemble::{CentroidSeries, SimConfig};
use crate::error::{Error, Result};

pub const SERIES_HEADER: &str = "t,x_mean,x_r,x_l,x_stderr";
pub const SWEEP_HEADER: &str = "theta,W,x_max,t_max,horizon,returning";

/// Resolved description of a finished run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub preset: String,
    pub config: SimConfig,
    pub master_seed: u64,
    pub version: String,
    pub duration: Duration,
    /// File name (relative to the output directory) to SHA-256 hex digest.
    pub checksums: BTreeMap<String, String>,
}

/// Headline observables of one written series.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesRecord {
    pub file: String,
    pub config: SimConfig,
    pub x_max: f64,
    pub t_max: usize,
    pub returning: bool,
    /// Absent when the run is too short for a tail average.
    pub plateau: Option<Plateau>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitRecord {
    pub table: String,
    pub parameter: SweepParameter,
    pub fit: PowerLawFit,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_checked(path: &Path, text: &str) -> Result<String> {
    fs::write(path, text).map_err(|e| Error::io(path, e))?;
    Ok(sha256_hex(text.as_bytes()))
}

pub fn series_csv(series: &CentroidSeries) -> String {
    let mut out = String::with_capacity(96 * (series.len() + 1));
    out.push_str(SERIES_HEADER);
    out.push('\n');
    for t in 0..series.len() {
        let _ = writeln!(
            out,
            "{t},{},{},{},{}",
            num(series.x_mean[t]),
            num(series.x_r[t]),
            num(series.x_l[t]),
            num(series.x_stderr[t])
        );
    }
    out
}

/// Writes the centroid series and returns the file's SHA-256.
pub fn write_series_csv(series: &CentroidSeries, path: &Path) -> Result<String> {
    write_checked(path, &series_csv(series))
}

/// Reads a series written by [`write_series_csv`]. The realization count is
/// not part of the file and comes back as zero.
pub fn read_series_csv(path: &Path) -> Result<CentroidSeries> {
    let table = read_csv(path)?;
    if table.header.join(",") != SERIES_HEADER {
        return Err(format_error(
            path,
            format!("expected header `{SERIES_HEADER}`"),
        ));
    }
    let mut series = CentroidSeries {
        x_mean: Vec::new(),
        x_r: Vec::new(),
        x_l: Vec::new(),
        x_stderr: Vec::new(),
        samples: 0,
    };
    for (i, row) in table.rows.iter().enumerate() {
        if row[0] != i.to_string() {
            return Err(format_error(
                path,
                format!("row {} has t = {}", i + 1, row[0]),
            ));
        }
        let v = |k: usize| parse_f64(path, &row[k]);
        series.x_mean.push(v(1)?);
        series.x_r.push(v(2)?);
        series.x_l.push(v(3)?);
        series.x_stderr.push(v(4)?);
    }
    Ok(series)
}

pub fn sweep_csv(table: &SweepTable) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for row in &table.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            num(row.config.theta.theta()),
            num(row.config.disorder_width),
            num(row.max.x_max),
            row.max.t_max,
            row.config.horizon,
            row.max.returning
        );
    }
    out
}

pub fn write_sweep_csv(table: &SweepTable, path: &Path) -> Result<String> {
    write_checked(path, &sweep_csv(table))
}

/// A CSV file as text cells.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    /// Cells of the named column parsed as numbers.
    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let k = self
            .header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Input(format!("no column `{name}` in {:?}", self.header)))?;
        self.rows
            .iter()
            .map(|row| {
                row[k].parse::<f64>().map_err(|_| {
                    Error::Input(format!("column `{name}`: `{}` is not a number", row[k]))
                })
            })
            .collect()
    }
}

pub fn read_csv(path: &Path) -> Result<CsvTable> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| format_error(path, "empty file".into()))?
        .split(',')
        .map(|s| s.trim().to_string())
        .collect();
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let row: Vec<String> = line.split(',').map(|s| s.trim().to_string()).collect();
        if row.len() != header.len() {
            return Err(format_error(
                path,
                format!(
                    "row {} has {} cells, header has {}",
                    i + 1,
                    row.len(),
                    header.len()
                ),
            ));
        }
        rows.push(row);
    }
    Ok(CsvTable { header, rows })
}

fn parse_f64(path: &Path, cell: &str) -> Result<f64> {
    cell.parse()
        .map_err(|_| format_error(path, format!("`{cell}` is not a number")))
}

fn format_error(path: &Path, message: String) -> Error {
    Error::Format {
        path: PathBuf::from(path),
        message,
    }
}

pub fn config_json(cfg: &SimConfig) -> Value {
    json!({
        "theta": cfg.theta.theta(),
        "disorder_width": cfg.disorder_width,
        "alpha": cfg.initial.alpha(),
        "beta": cfg.initial.beta(),
        "horizon": cfg.horizon,
        "ensemble_size": cfg.ensemble_size,
        "master_seed": cfg.master_seed,
        "disorder_mode": cfg.disorder_mode.as_str(),
    })
}

pub fn fit_json(record: &FitRecord) -> Value {
    let f = &record.fit;
    json!({
        "table": record.table,
        "parameter": record.parameter.column(),
        "exponent": f.exponent,
        "log_prefactor": f.log_prefactor,
        "prefactor": f.log_prefactor.exp(),
        "r_squared": f.r_squared,
        "range": [f.fit_range.0, f.fit_range.1],
        "points": f.points,
    })
}

fn sweep_json(table: &SweepTable) -> Value {
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|row| {
            json!({
                "theta": row.config.theta.theta(),
                "W": row.config.disorder_width,
                "x_max": row.max.x_max,
                "t_max": row.max.t_max,
                "horizon": row.config.horizon,
                "returning": row.max.returning,
            })
        })
        .collect();
    json!({
        "parameter": table.parameter.column(),
        "direction": table.direction.as_str(),
        "rows": rows,
    })
}

fn series_json(record: &SeriesRecord) -> Value {
    json!({
        "config": config_json(&record.config),
        "x_max": record.x_max,
        "t_max": record.t_max,
        "returning": record.returning,
        "plateau": record.plateau.map(|p| p.level),
        "plateau_band": record.plateau.map(|p| p.band),
        "plateau_start": record.plateau.map(|p| p.start),
    })
}

/// The summary document. Keys are sorted, and nothing in it depends on the
/// machine or the clock, so equal inputs give identical bytes.
pub fn summary_json(
    manifest: &RunManifest,
    series: &[SeriesRecord],
    tables: &[(String, SweepTable)],
    fit: Option<&FitRecord>,
) -> String {
    let mut doc = Map::new();
    doc.insert("preset".into(), json!(manifest.preset));
    doc.insert("version".into(), json!(manifest.version));
    doc.insert("master_seed".into(), json!(manifest.master_seed));
    doc.insert("config".into(), config_json(&manifest.config));
    if !manifest.checksums.is_empty() {
        doc.insert("files".into(), json!(manifest.checksums));
    }
    if !series.is_empty() {
        let map: Map<String, Value> = series
            .iter()
            .map(|r| (r.file.clone(), series_json(r)))
            .collect();
        doc.insert("series".into(), Value::Object(map));
    }
    if !tables.is_empty() {
        let map: Map<String, Value> = tables
            .iter()
            .map(|(name, t)| (name.clone(), sweep_json(t)))
            .collect();
        doc.insert("sweeps".into(), Value::Object(map));
    }
    if let Some(fit) = fit {
        doc.insert("fit".into(), fit_json(fit));
    }
    let mut text =
        serde_json::to_string_pretty(&Value::Object(doc)).expect("JSON values always serialize");
    text.push('\n');
    text
}

pub fn write_summary_json(
    manifest: &RunManifest,
    series: &[SeriesRecord],
    tables: &[(String, SweepTable)],
    fit: Option<&FitRecord>,
    path: &Path,
) -> Result<String> {
    write_checked(path, &summary_json(manifest, series, tables, fit))
}

/// Plain-text manifest: one `key: value` line per item, then one
/// `<sha256>  <file>` line per artifact.
pub fn manifest_text(manifest: &RunManifest) -> String {
    let c = &manifest.config;
    let mut out = String::new();
    let _ = writeln!(out, "version: {}", manifest.version);
    let _ = writeln!(out, "preset: {}", manifest.preset);
    let _ = writeln!(out, "master_seed: {}", manifest.master_seed);
    let _ = writeln!(out, "theta: {}", num(c.theta.theta()));
    let _ = writeln!(out, "disorder_width: {}", num(c.disorder_width));
    let _ = writeln!(out, "alpha: {}", num(c.initial.alpha()));
    let _ = writeln!(out, "beta: {}", num(c.initial.beta()));
    let _ = writeln!(out, "horizon: {}", c.horizon);
    let _ = writeln!(out, "ensemble_size: {}", c.ensemble_size);
    let _ = writeln!(out, "disorder_mode: {}", c.disorder_mode.as_str());
    let _ = writeln!(
        out,
        "duration_seconds: {:.3}",
        manifest.duration.as_secs_f64()
    );
    out.push_str("checksums:\n");
    for (file, sum) in &manifest.checksums {
        let _ = writeln!(out, "{sum}  {file}");
    }
    out
}

pub fn write_manifest(manifest: &RunManifest, path: &Path) -> Result<String> {
    write_checked(path, &manifest_text(manifest))
}
