//! Experiment descriptions and the runner behind the `simulate` binary.
//!
//! A description is a TOML file with `units = "gamma"` and a `kind` of
//! `spectrum`, `pulse`, `memory` or `sweep`. Built-in presets cover the
//! standard configurations; any key can be overridden with a dot path.

pub mod config;
pub mod run;
pub mod sweep;

pub use config::{
    preset_names, preset_source, AtomSection, CarrierSpec, ControlSection, ExperimentConfig, ExperimentKind, LoadedConfig,
    MemorySection, OutputSection, PulseSection, SpectrumSection, SweepAxis, SweepSection, UNITS,
};
pub use run::{evaluate, metric_names, run, write_outcome, Artifact, Outcome, RunOptions, RunReport, Table, CODE_VERSION};
pub use sweep::{run_sweep, sweep_points, SweepPoint, SWEEP_FILE};
