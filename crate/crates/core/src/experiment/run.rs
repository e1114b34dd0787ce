//! Evaluation of single experiments and the file layout of their outputs.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use super::config::{ExperimentConfig, ExperimentKind, LoadedConfig, UNITS};
use crate::dressed::{eit_diagnostics, find_at_resonances, scan_spectrum, uniform_grid, SusceptibilitySpectrum};
use crate::error::{Error, Result};
use crate::io;
use crate::memory::{retrieve, store, SpinWave};
use crate::transport::{propagate_pulse, pulse_metrics};

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Tabular payload of one output file.
#[derive(Debug, Clone)]
pub enum Table {
    Spectrum(SusceptibilitySpectrum),
    Waveform { times: Vec<f64>, values: Vec<Complex64> },
    SpinWave(SpinWave),
}

impl Table {
    pub fn columns(&self) -> [&'static str; 4] {
        match self {
            Table::Spectrum(_) => io::SPECTRUM_HEADER,
            Table::Waveform { .. } => io::WAVEFORM_HEADER,
            Table::SpinWave(_) => io::SPIN_WAVE_HEADER,
        }
    }

    fn content(&self) -> &'static str {
        match self {
            Table::Spectrum(_) => "susceptibility_spectrum",
            Table::Waveform { .. } => "waveform",
            Table::SpinWave(_) => "spin_wave",
        }
    }

    fn save(&self, path: &Path) -> Result<()> {
        match self {
            Table::Spectrum(s) => io::save_spectrum(path, s),
            Table::Waveform { times, values } => io::save_waveform(path, times, values),
            Table::SpinWave(w) => io::save_spin_wave(path, w),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Artifact {
    pub file: String,
    pub table: Table,
    pub details: Value,
}

/// Everything one experiment produced, before anything touches the disk.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub kind: ExperimentKind,
    pub artifacts: Vec<Artifact>,
    /// Named scalars in a fixed order; these become sweep columns.
    pub metrics: Vec<(String, f64)>,
    pub summary: Value,
    pub warnings: Vec<String>,
}

impl Outcome {
    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }
}

/// `-1 -> "m1"`, `0 -> "0"`, `2.5 -> "p2.5"`.
pub(crate) fn signed_tag(x: f64) -> String {
    if x == 0.0 {
        "0".into()
    } else if x < 0.0 {
        format!("m{}", -x)
    } else {
        format!("p{x}")
    }
}

fn spectrum_prefix(config: &ExperimentConfig, model: &str, detuning: f64) -> String {
    if config.spectrum.control_detunings.is_empty() {
        model.to_string()
    } else {
        format!("{model}_delta_{}", signed_tag(detuning))
    }
}

/// Names of the scalars [`evaluate`] reports for this description, in order.
pub fn metric_names(config: &ExperimentConfig) -> Vec<String> {
    let mut names = Vec::new();
    match config.kind {
        ExperimentKind::Spectrum => {
            for d in config.control_detunings() {
                for model in &config.spectrum.models {
                    let p = spectrum_prefix(config, model.label(), d);
                    for m in ["peak_count", "min_absorption", "eit_location", "eit_shift", "residual_absorption"] {
                        names.push(format!("{p}_{m}"));
                    }
                }
            }
        }
        ExperimentKind::Pulse => {
            names.push("carrier".into());
            for &q in &config.pulse.modes {
                let t = signed_tag(q as f64);
                for m in ["delay", "transmission", "tail_fraction"] {
                    names.push(format!("{m}_q{t}"));
                }
            }
        }
        ExperimentKind::Memory => {
            names.extend(["carrier", "leakage", "stored_fraction", "spin_wave_centroid"].map(String::from));
            for d in &config.memory.directions {
                names.push(format!("efficiency_{}", d.label()));
            }
            names.push("max_error_estimate".into());
        }
        ExperimentKind::Sweep => {}
    }
    names
}

/// Runs a spectrum, pulse or memory experiment.
pub fn evaluate(config: &ExperimentConfig) -> Result<Outcome> {
    config.validate()?;
    match config.kind {
        ExperimentKind::Spectrum => evaluate_spectrum(config),
        ExperimentKind::Pulse => evaluate_pulse(config),
        ExperimentKind::Memory => evaluate_memory(config),
        ExperimentKind::Sweep => Err(Error::Config("evaluate() takes a single experiment; use run_sweep".into())),
    }
}

fn evaluate_spectrum(config: &ExperimentConfig) -> Result<Outcome> {
    let s = &config.spectrum;
    let mut artifacts = Vec::new();
    let mut metrics = Vec::new();
    let mut panels = Vec::new();
    for d in config.control_detunings() {
        let (start, end) = if s.relative_to_control {
            (d + s.start, d + s.end)
        } else {
            (s.start, s.end)
        };
        let grid = uniform_grid(start, end, s.points);
        for &model in &s.models {
            let spectrum = scan_spectrum(&config.dressed_medium(d, model)?, &grid)?;
            let peaks = find_at_resonances(&spectrum);
            let eit = eit_diagnostics(&spectrum);
            let prefix = spectrum_prefix(config, model.label(), d);
            let (loc, shift, resid) = match &eit {
                Ok(e) => (e.location, e.shift, e.residual_absorption),
                Err(_) => (f64::NAN, f64::NAN, f64::NAN),
            };
            let min_abs = spectrum.min_absorption();
            for (m, v) in [
                ("peak_count", peaks.len() as f64),
                ("min_absorption", min_abs),
                ("eit_location", loc),
                ("eit_shift", shift),
                ("residual_absorption", resid),
            ] {
                metrics.push((format!("{prefix}_{m}"), v));
            }
            let details = json!({
                "model": model.label(),
                "control": spectrum.control(),
                "grid": {"start": start, "end": end, "points": s.points},
                "peaks": peaks,
                "min_absorption": min_abs,
                "eit": match eit {
                    Ok(e) => serde_json::to_value(e)?,
                    Err(e) => json!({"error": e.tag()}),
                },
            });
            panels.push(details.clone());
            artifacts.push(Artifact {
                file: format!("spectrum_{prefix}.csv"),
                table: Table::Spectrum(spectrum),
                details,
            });
        }
    }
    Ok(Outcome {
        kind: ExperimentKind::Spectrum,
        artifacts,
        metrics,
        summary: json!({ "spectra": panels }),
        warnings: Vec::new(),
    })
}

fn evaluate_pulse(config: &ExperimentConfig) -> Result<Outcome> {
    let (carrier, peak) = config.resolve_carrier()?;
    let medium = config.dressed_medium(config.control.detuning, crate::dressed::SpectrumModel::Full)?;
    let mut artifacts = Vec::new();
    let mut metrics = vec![("carrier".to_string(), carrier)];
    let mut modes = Vec::new();
    let mut warnings = Vec::new();
    for &q in &config.pulse.modes {
        let pulse = config.pulse_spec(carrier, q);
        let record = propagate_pulse(&pulse, &config.medium, &medium, &config.sampling)?;
        let m = pulse_metrics(&record, &pulse);
        let tag = signed_tag(q as f64);
        metrics.push((format!("delay_q{tag}"), m.delay));
        metrics.push((format!("transmission_q{tag}"), m.transmission));
        metrics.push((format!("tail_fraction_q{tag}"), m.tail_fraction));
        warnings.extend(record.warnings.iter().cloned());
        let details = json!({
            "mode": q,
            "mode_carrier": pulse.carrier(),
            "metrics": m,
            "input_energy": record.input_energy,
            "output_energy": record.output_energy,
            "window": record.window,
            "warnings": record.warnings,
        });
        modes.push(details.clone());
        artifacts.push(Artifact {
            file: format!("pulse_q{tag}_input.csv"),
            table: Table::Waveform {
                times: record.times.clone(),
                values: record.input.clone(),
            },
            details: details.clone(),
        });
        artifacts.push(Artifact {
            file: format!("pulse_q{tag}_output.csv"),
            table: Table::Waveform {
                times: record.times,
                values: record.output,
            },
            details,
        });
    }
    Ok(Outcome {
        kind: ExperimentKind::Pulse,
        artifacts,
        metrics,
        summary: json!({ "carrier": carrier, "raman_peak": peak, "modes": modes }),
        warnings,
    })
}

fn evaluate_memory(config: &ExperimentConfig) -> Result<Outcome> {
    let (carrier, peak) = config.resolve_carrier()?;
    let protocol = config.protocol(carrier)?;
    let stored = store(&protocol)?;
    let reports = config
        .memory
        .directions
        .iter()
        .map(|&d| retrieve(&protocol, &stored, d))
        .collect::<Result<Vec<_>>>()?;
    let first = &reports[0];
    let mut metrics = vec![
        ("carrier".to_string(), carrier),
        ("leakage".to_string(), first.leakage),
        ("stored_fraction".to_string(), first.stored_fraction),
        ("spin_wave_centroid".to_string(), first.spin_wave.centroid()),
    ];
    for r in &reports {
        metrics.push((format!("efficiency_{}", r.direction.label()), r.efficiency));
    }
    let max_err = reports.iter().map(|r| r.max_error_estimate).fold(0.0, f64::max);
    metrics.push(("max_error_estimate".to_string(), max_err));

    let summaries: Vec<_> = reports.iter().map(|r| r.summary()).collect();
    let common = json!({
        "carrier": carrier,
        "stored_mode": config.memory.mode,
        "stored_mode_carrier": protocol.pulse.carrier(),
        "raman_peak": peak,
        "extraction_time": protocol.extraction_time(),
    });
    let mut artifacts = vec![
        Artifact {
            file: "write_exit.csv".into(),
            table: Table::Waveform {
                times: stored.write_waveform.times.clone(),
                values: stored.write_waveform.output.clone(),
            },
            details: json!({ "stage": "write", "leakage": first.leakage, "protocol": common }),
        },
        Artifact {
            file: "spin_wave.csv".into(),
            table: Table::SpinWave(first.spin_wave.clone()),
            details: json!({
                "stage": "stored",
                "stored_fraction": first.stored_fraction,
                "centroid": first.spin_wave.centroid(),
                "protocol": common,
            }),
        },
    ];
    for r in &reports {
        artifacts.push(Artifact {
            file: format!("retrieved_{}.csv", r.direction.label()),
            table: Table::Waveform {
                times: r.retrieved_waveform.times.clone(),
                values: r.retrieved_waveform.output.clone(),
            },
            details: json!({ "stage": "read", "report": r.summary(), "protocol": common }),
        });
    }
    Ok(Outcome {
        kind: ExperimentKind::Memory,
        artifacts,
        metrics,
        summary: json!({ "protocol": common, "reports": summaries }),
        warnings: stored.warnings,
    })
}

/// Metadata written next to every output file.
#[derive(Debug, Serialize)]
struct Sidecar<'a> {
    file: &'a str,
    content: &'a str,
    columns: &'a [&'a str],
    units: &'a str,
    code_version: &'a str,
    config: &'a ExperimentConfig,
    config_toml: &'a str,
    details: &'a Value,
}

pub(crate) fn config_toml(config: &ExperimentConfig) -> Result<String> {
    toml::to_string(config).map_err(|e| Error::Config(format!("cannot echo config as TOML: {e}")))
}

pub(crate) fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".json");
    path.with_file_name(name)
}

/// Where a run leaves its files.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Overrides `output.directory`; the default is `./out/<name or kind>`.
    pub out_dir: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl RunOptions {
    pub fn resolve_dir(&self, config: &ExperimentConfig) -> PathBuf {
        if let Some(d) = &self.out_dir {
            return d.clone();
        }
        if let Some(d) = &config.output.directory {
            return d.clone();
        }
        let name = if config.name.is_empty() {
            config.kind.label()
        } else {
            &config.name
        };
        PathBuf::from("out").join(name)
    }
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub out_dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
    /// Sweep points that ended in an error row.
    pub failed_points: usize,
}

/// Writes all outputs into a staging directory first and moves them into
/// place only once every file is complete.
pub fn write_outcome(config: &ExperimentConfig, outcome: &Outcome, out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let staging = out_dir.join(format!(".staging-{}", std::process::id()));
    let result = write_staged(config, outcome, &staging, out_dir);
    if staging.exists() {
        let _ = fs::remove_dir_all(&staging);
    }
    result
}

fn write_staged(config: &ExperimentConfig, outcome: &Outcome, staging: &Path, out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(staging).map_err(|e| Error::io(staging, e))?;
    let toml_echo = config_toml(config)?;
    let mut names = Vec::new();
    for a in &outcome.artifacts {
        let path = staging.join(&a.file);
        a.table.save(&path)?;
        let sidecar = Sidecar {
            file: &a.file,
            content: a.table.content(),
            columns: &a.table.columns(),
            units: UNITS,
            code_version: CODE_VERSION,
            config,
            config_toml: &toml_echo,
            details: &a.details,
        };
        io::save_json(&sidecar_path(&path), &sidecar)?;
        names.push(a.file.clone());
        names.push(format!("{}.json", a.file));
    }
    let metrics: serde_json::Map<String, Value> = outcome
        .metrics
        .iter()
        .map(|(k, v)| (k.clone(), serde_json::to_value(v).unwrap_or(Value::Null)))
        .collect();
    let run = json!({
        "kind": outcome.kind,
        "name": config.name,
        "units": UNITS,
        "code_version": CODE_VERSION,
        "files": outcome.artifacts.iter().map(|a| a.file.as_str()).collect::<Vec<_>>(),
        "metrics": metrics,
        "summary": outcome.summary,
        "warnings": outcome.warnings,
        "config": config,
        "config_toml": toml_echo,
    });
    io::save_json(&staging.join("run.json"), &run)?;
    names.push("run.json".into());

    let mut moved = Vec::new();
    for name in names {
        let dest = out_dir.join(&name);
        fs::rename(staging.join(&name), &dest).map_err(|e| Error::io(&dest, e))?;
        moved.push(dest);
    }
    Ok(moved)
}

/// Runs any experiment, sweeps included, inside a thread pool of the
/// requested size.
pub fn run(loaded: &LoadedConfig, options: &RunOptions) -> Result<RunReport> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = options.threads {
        if n == 0 {
            return Err(Error::Config("--threads must be at least 1".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("cannot start thread pool: {e}")))?;
    let out_dir = options.resolve_dir(&loaded.config);
    pool.install(|| {
        if loaded.config.kind == ExperimentKind::Sweep {
            return super::sweep::run_sweep(loaded, &out_dir);
        }
        let outcome = evaluate(&loaded.config)?;
        let files = write_outcome(&loaded.config, &outcome, &out_dir)?;
        Ok(RunReport {
            out_dir: out_dir.clone(),
            files,
            warnings: outcome.warnings,
            failed_points: 0,
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tags() {
        assert_eq!(signed_tag(-1.0), "m1");
        assert_eq!(signed_tag(0.0), "0");
        assert_eq!(signed_tag(12.5), "p12.5");
    }

    #[test]
    fn metric_names_match_evaluation() {
        let loaded = LoadedConfig::load("fig3")
            .unwrap()
            .with_overrides(&["spectrum.points=2001", "spectrum.end=40.0"])
            .unwrap();
        let outcome = evaluate(&loaded.config).unwrap();
        let names: Vec<_> = outcome.metrics.iter().map(|(n, _)| n.clone()).collect();
        assert_eq!(names, metric_names(&loaded.config));
        assert_eq!(outcome.artifacts.len(), 3);
    }

    #[test]
    fn failed_run_leaves_no_files() {
        let dir = tempfile::tempdir().unwrap();
        let loaded = LoadedConfig::load("fig3")
            .unwrap()
            .with_overrides(&["spectrum.points=201"])
            .unwrap();
        let outcome = evaluate(&loaded.config).unwrap();
        // A file name that cannot be created makes the second write fail.
        let mut broken = outcome.clone();
        broken.artifacts[1].file = "missing/sub/dir.csv".into();
        assert!(write_outcome(&loaded.config, &broken, dir.path()).is_err());
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
        let files = write_outcome(&loaded.config, &outcome, dir.path()).unwrap();
        assert_eq!(files.len(), 7);
    }
}
