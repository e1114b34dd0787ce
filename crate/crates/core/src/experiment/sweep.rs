//! Parameter sweeps over one or two axes.
//!
//! Points run in parallel; a single writer appends each finished row to
//! `sweep.csv` and flushes it, so an interrupted sweep resumes from the rows
//! already on disk. Failed points become rows tagged with the error kind.
//! When every point is done the table is rewritten sorted by point index.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::sync::mpsc;

use rayon::prelude::*;
use serde_json::json;

use super::config::{ExperimentConfig, ExperimentKind, LoadedConfig, UNITS};
use super::run::{config_toml, evaluate, metric_names, sidecar_path, write_outcome, RunReport, CODE_VERSION};
use crate::error::{Error, Result};
use crate::io::{self, format_number};

pub const SWEEP_FILE: &str = "sweep.csv";

/// One grid point: its row index and the value on each axis.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub index: usize,
    pub values: Vec<f64>,
}

/// Cartesian product of the axes, first axis slowest.
pub fn sweep_points(config: &ExperimentConfig) -> Result<Vec<SweepPoint>> {
    let axes = config
        .sweep
        .axes
        .iter()
        .map(|a| a.points())
        .collect::<Result<Vec<_>>>()?;
    let mut points = vec![Vec::new()];
    for axis in &axes {
        points = points
            .into_iter()
            .flat_map(|p| {
                axis.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    Ok(points
        .into_iter()
        .enumerate()
        .map(|(index, values)| SweepPoint { index, values })
        .collect())
}

/// The base experiment with the sweep section stripped.
fn base_raw(loaded: &LoadedConfig) -> toml::Value {
    let mut raw = loaded.raw.clone();
    if let Some(t) = raw.as_table_mut() {
        t.remove("sweep");
        t.insert("kind".into(), toml::Value::String(loaded.config.sweep.base.label().into()));
    }
    raw
}

fn point_config(base: &toml::Value, config: &ExperimentConfig, point: &SweepPoint) -> Result<ExperimentConfig> {
    let mut raw = base.clone();
    for (axis, &v) in config.sweep.axes.iter().zip(&point.values) {
        super::config::set_path(&mut raw, &axis.parameter, toml::Value::Float(v))?;
    }
    Ok(LoadedConfig::from_value(raw)?.config)
}

pub fn header(config: &ExperimentConfig, metrics: &[String]) -> Vec<String> {
    let mut h = vec!["point".to_string()];
    h.extend(config.sweep.axes.iter().map(|a| a.parameter.clone()));
    h.push("status".into());
    h.push("error".into());
    h.extend(metrics.iter().cloned());
    h
}

fn evaluate_point(base: &toml::Value, config: &ExperimentConfig, names: &[String], point: &SweepPoint) -> Vec<String> {
    let mut row = vec![point.index.to_string()];
    row.extend(point.values.iter().map(|&v| format_number(v)));
    let result = point_config(base, config, point).and_then(|c| evaluate(&c));
    match result {
        Ok(outcome) if outcome.metrics.iter().map(|(n, _)| n).eq(names.iter()) => {
            row.push("ok".into());
            row.push(String::new());
            row.extend(outcome.metrics.iter().map(|(_, v)| format_number(*v)));
        }
        Ok(_) => {
            row.push("error".into());
            row.push("config".into());
            row.extend(names.iter().map(|_| String::new()));
        }
        Err(e) => {
            log::warn!("sweep point {} failed: {e}", point.index);
            row.push("error".into());
            row.push(e.tag().into());
            row.extend(names.iter().map(|_| String::new()));
        }
    }
    row
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    Error::io(path, std::io::Error::other(e.to_string()))
}

/// Rows already on disk, keyed by point index. A later row for the same
/// point replaces an earlier one.
fn existing_rows(path: &Path, expected: &[String]) -> Result<BTreeMap<usize, Vec<String>>> {
    let mut rows = BTreeMap::new();
    if !path.exists() {
        return Ok(rows);
    }
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .from_path(path)
        .map_err(|e| csv_err(path, e))?;
    let found: Vec<String> = reader.headers().map_err(|e| csv_err(path, e))?.iter().map(String::from).collect();
    if found != expected {
        return Err(Error::Config(format!(
            "{} has columns that do not match this sweep; move it away or pick another output directory",
            path.display()
        )));
    }
    for record in reader.records() {
        // A truncated last line from an interrupted run is simply dropped.
        let Ok(record) = record else { continue };
        if record.len() != expected.len() {
            continue;
        }
        let row: Vec<String> = record.iter().map(String::from).collect();
        if let Ok(i) = row[0].parse::<usize>() {
            rows.insert(i, row);
        }
    }
    Ok(rows)
}

fn write_table(path: &Path, header: &[String], rows: &BTreeMap<usize, Vec<String>>) -> Result<()> {
    let tmp = path.with_extension("csv.tmp");
    {
        let mut w = csv::Writer::from_path(&tmp).map_err(|e| csv_err(&tmp, e))?;
        w.write_record(header).map_err(|e| csv_err(&tmp, e))?;
        for row in rows.values() {
            w.write_record(row).map_err(|e| csv_err(&tmp, e))?;
        }
        w.flush().map_err(|e| Error::io(&tmp, e))?;
    }
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Runs a sweep into `out_dir`. With no axes this is exactly the base
/// experiment.
pub fn run_sweep(loaded: &LoadedConfig, out_dir: &Path) -> Result<RunReport> {
    let config = &loaded.config;
    let base = base_raw(loaded);
    if config.sweep.axes.is_empty() {
        let single = LoadedConfig::from_value(base)?.config;
        let outcome = evaluate(&single)?;
        let files = write_outcome(&single, &outcome, out_dir)?;
        return Ok(RunReport {
            out_dir: out_dir.to_path_buf(),
            files,
            warnings: outcome.warnings,
            failed_points: 0,
        });
    }

    let base_config = LoadedConfig::from_value(base.clone())?.config;
    debug_assert_ne!(base_config.kind, ExperimentKind::Sweep);
    let names = metric_names(&base_config);
    let header = header(config, &names);
    let points = sweep_points(config)?;
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let path = out_dir.join(SWEEP_FILE);

    let mut rows = existing_rows(&path, &header)?;
    let same_point = |row: &Vec<String>, p: &SweepPoint| {
        p.values.iter().enumerate().all(|(k, &v)| row[1 + k] == format_number(v))
    };
    let done = |p: &SweepPoint| {
        rows.get(&p.index)
            .is_some_and(|row| same_point(row, p) && row[1 + p.values.len()] == "ok")
    };
    if let Some((i, _)) = rows
        .iter()
        .find(|(i, row)| points.get(**i).is_none_or(|p| !same_point(row, p)))
    {
        return Err(Error::Config(format!(
            "{} row {i} belongs to a different sweep grid; move it away or pick another output directory",
            path.display()
        )));
    }
    let todo: Vec<&SweepPoint> = points.iter().filter(|p| !done(p)).collect();
    if todo.len() < points.len() {
        log::info!("resuming sweep: {} of {} points already done", points.len() - todo.len(), points.len());
    }

    if !path.exists() {
        write_table(&path, &header, &BTreeMap::new())?;
    }
    let (tx, rx) = mpsc::channel::<Vec<String>>();
    let writer_path = path.clone();
    let fresh: Result<Vec<Vec<String>>> = std::thread::scope(|scope| {
        let writer = scope.spawn(move || -> Result<Vec<Vec<String>>> {
            let file = fs::OpenOptions::new()
                .append(true)
                .open(&writer_path)
                .map_err(|e| Error::io(&writer_path, e))?;
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
            let mut all = Vec::new();
            for row in rx {
                w.write_record(&row).map_err(|e| csv_err(&writer_path, e))?;
                w.flush().map_err(|e| Error::io(&writer_path, e))?;
                all.push(row);
            }
            Ok(all)
        });
        todo.par_iter().for_each_with(tx, |tx, p| {
            let _ = tx.send(evaluate_point(&base, config, &names, p));
        });
        writer.join().unwrap_or_else(|_| Err(Error::Config("sweep writer thread panicked".into())))
    });
    for row in fresh? {
        let i: usize = row[0].parse().unwrap_or(usize::MAX);
        rows.insert(i, row);
    }
    write_table(&path, &header, &rows)?;

    let failed_points = rows.values().filter(|r| r[1 + config.sweep.axes.len()] != "ok").count();
    let sidecar = json!({
        "file": SWEEP_FILE,
        "content": "sweep_table",
        "columns": header,
        "units": UNITS,
        "code_version": CODE_VERSION,
        "points": points.len(),
        "failed_points": failed_points,
        "config": config,
        "config_toml": config_toml(config)?,
    });
    let sidecar_file = sidecar_path(&path);
    io::save_json(&sidecar_file, &sidecar)?;
    let mut warnings = Vec::new();
    if failed_points > 0 {
        warnings.push(format!("{failed_points} of {} sweep points failed", points.len()));
    }
    Ok(RunReport {
        out_dir: out_dir.to_path_buf(),
        files: vec![path, sidecar_file],
        warnings,
        failed_points,
    })
}
