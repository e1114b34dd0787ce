//! TOML experiment descriptions, presets and dot-path overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::atomic::{build_couplings, AtomModel, HalfInt, CESIUM_D1_HYPERFINE_SPLITTING, CESIUM_NUCLEAR_SPIN};
use crate::dressed::{find_resonance_near, ControlField, DressedMedium, MomentumDistribution, SpectrumModel};
use crate::error::{Error, Result};
use crate::memory::{ProtocolConfig, ReadDirection, SolverSettings, SwitchProfile};
use crate::transport::{MediumSpec, PulseShape, PulseSpec, Sampling};

pub const UNITS: &str = "gamma";

const PRESETS: [(&str, &str); 5] = [
    ("fig3", include_str!("../../presets/fig3.toml")),
    ("fig4", include_str!("../../presets/fig4.toml")),
    ("fig5", include_str!("../../presets/fig5.toml")),
    ("fig6", include_str!("../../presets/fig6.toml")),
    ("fig6-carrier-sweep", include_str!("../../presets/fig6-carrier-sweep.toml")),
];

pub fn preset_names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(n, _)| *n)
}

pub fn preset_source(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Spectrum,
    Pulse,
    Memory,
    Sweep,
}

impl ExperimentKind {
    pub fn label(self) -> &'static str {
        match self {
            ExperimentKind::Spectrum => "spectrum",
            ExperimentKind::Pulse => "pulse",
            ExperimentKind::Memory => "memory",
            ExperimentKind::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AtomSection {
    pub nuclear_spin: f64,
    pub hyperfine_splitting: f64,
}

impl Default for AtomSection {
    fn default() -> Self {
        AtomSection {
            nuclear_spin: CESIUM_NUCLEAR_SPIN.value(),
            hyperfine_splitting: CESIUM_D1_HYPERFINE_SPLITTING,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ControlSection {
    /// Control detuning `Delta` from the `m' -> n` transition.
    pub detuning: f64,
    pub rabi: f64,
}

impl Default for ControlSection {
    fn default() -> Self {
        ControlSection { detuning: 0.0, rabi: 15.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumSection {
    pub start: f64,
    pub end: f64,
    pub points: usize,
    pub models: Vec<SpectrumModel>,
    /// One spectrum per listed control detuning; empty means `control.detuning`.
    pub control_detunings: Vec<f64>,
    /// Grid bounds are offsets from the control detuning.
    pub relative_to_control: bool,
}

impl Default for SpectrumSection {
    fn default() -> Self {
        SpectrumSection {
            start: -40.0,
            end: 40.0,
            points: 8001,
            models: vec![SpectrumModel::Full],
            control_detunings: Vec::new(),
            relative_to_control: false,
        }
    }
}

/// How the central carrier `w_bar` is fixed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reference", rename_all = "snake_case", deny_unknown_fields)]
pub enum CarrierSpec {
    Absolute {
        value: f64,
    },
    /// Mode `anchor_mode` sits `offset` to the blue of the Raman absorption
    /// peak nearest the control detuning.
    RamanPeak {
        #[serde(default)]
        offset: f64,
        #[serde(default = "default_anchor")]
        anchor_mode: i32,
    },
}

fn default_anchor() -> i32 {
    -1
}

impl Default for CarrierSpec {
    fn default() -> Self {
        CarrierSpec::RamanPeak {
            offset: 0.0,
            anchor_mode: -1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PulseSection {
    pub duration: f64,
    pub shape: PulseShape,
    pub carrier: CarrierSpec,
    pub modes: Vec<i32>,
}

impl Default for PulseSection {
    fn default() -> Self {
        PulseSection {
            duration: 10.0,
            shape: PulseShape::Rectangular,
            carrier: CarrierSpec::default(),
            modes: vec![-1, 0, 1],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MemorySection {
    /// Which side mode of the pulse is stored.
    pub mode: i32,
    pub write_off_time: Option<f64>,
    pub settle_time: f64,
    pub storage_time: f64,
    pub read_duration: f64,
    pub directions: Vec<ReadDirection>,
    pub switch_profile: SwitchProfile,
    pub spin_decay: f64,
    pub solver: SolverSettings,
}

impl Default for MemorySection {
    fn default() -> Self {
        MemorySection {
            mode: -1,
            write_off_time: None,
            settle_time: 20.0,
            storage_time: 0.0,
            read_duration: 60.0,
            directions: vec![ReadDirection::Forward, ReadDirection::Backward],
            switch_profile: SwitchProfile::Instantaneous,
            spin_decay: 0.0,
            solver: SolverSettings::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    /// Dot path into the experiment description, e.g. `control.rabi`.
    pub parameter: String,
    #[serde(default)]
    pub values: Option<Vec<f64>>,
    #[serde(default)]
    pub start: Option<f64>,
    #[serde(default)]
    pub end: Option<f64>,
    #[serde(default)]
    pub count: Option<usize>,
}

impl SweepAxis {
    pub fn points(&self) -> Result<Vec<f64>> {
        match (&self.values, self.start, self.end, self.count) {
            (Some(v), None, None, None) => {
                if v.iter().all(|x| x.is_finite()) {
                    Ok(v.clone())
                } else {
                    Err(Error::Config(format!("sweep axis {}: non-finite value", self.parameter)))
                }
            }
            (None, Some(a), Some(b), Some(n)) if a.is_finite() && b.is_finite() => {
                Ok(crate::dressed::uniform_grid(a, b, n))
            }
            _ => Err(Error::Config(format!(
                "sweep axis {} needs either `values` or all of `start`, `end`, `count`",
                self.parameter
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub base: ExperimentKind,
    pub axes: Vec<SweepAxis>,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            base: ExperimentKind::Memory,
            axes: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub directory: Option<PathBuf>,
}

/// A complete experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub units: String,
    pub kind: ExperimentKind,
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub atom: AtomSection,
    #[serde(default)]
    pub control: ControlSection,
    #[serde(default)]
    pub momentum: MomentumDistribution,
    #[serde(default)]
    pub spectrum: SpectrumSection,
    #[serde(default = "default_medium")]
    pub medium: MediumSpec,
    #[serde(default)]
    pub pulse: PulseSection,
    #[serde(default)]
    pub sampling: Sampling,
    #[serde(default)]
    pub memory: MemorySection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub output: OutputSection,
}

fn default_medium() -> MediumSpec {
    MediumSpec::new(50.0)
}

/// A parsed description together with the raw TOML tree it came from, which
/// sweeps edit point by point.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: ExperimentConfig,
    pub raw: toml::Value,
}

impl LoadedConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: toml::Value = toml::from_str(text).map_err(|e| Error::Config(one_line(&e.to_string())))?;
        Self::from_value(raw)
    }

    pub fn from_value(raw: toml::Value) -> Result<Self> {
        let config: ExperimentConfig = raw
            .clone()
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(one_line(&e.to_string())))?;
        config.validate()?;
        Ok(LoadedConfig { config, raw })
    }

    /// A preset name or a path to a TOML file.
    pub fn load(source: &str) -> Result<Self> {
        if let Some(text) = preset_source(source) {
            return Self::from_toml_str(text);
        }
        let path = Path::new(source);
        let text = std::fs::read_to_string(path).map_err(|e| {
            let presets: Vec<_> = preset_names().collect();
            Error::Config(format!(
                "cannot read {}: {e} (not a preset either; presets: {})",
                path.display(),
                presets.join(", ")
            ))
        })?;
        Self::from_toml_str(&text)
    }

    /// Applies `key=value` overrides; the value is parsed as a TOML literal
    /// and falls back to a bare string.
    pub fn with_overrides<S: AsRef<str>>(self, overrides: &[S]) -> Result<Self> {
        let mut raw = self.raw;
        for item in overrides {
            let item = item.as_ref();
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("override `{item}` is not key=value")))?;
            set_path(&mut raw, key.trim(), parse_literal(value.trim()))?;
        }
        Self::from_value(raw)
    }
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

pub(crate) fn parse_literal(text: &str) -> toml::Value {
    #[derive(Deserialize)]
    struct Wrap {
        v: toml::Value,
    }
    toml::from_str::<Wrap>(&format!("v = {text}"))
        .map(|w| w.v)
        .unwrap_or_else(|_| toml::Value::String(text.to_string()))
}

/// Sets a dot-separated path, creating tables as needed. Numbers adapt to
/// the type already present, so `points=400.0` lands as an integer.
pub(crate) fn set_path(root: &mut toml::Value, path: &str, value: toml::Value) -> Result<()> {
    let parts: Vec<&str> = path.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::Config(format!("malformed key `{path}`")));
    }
    let mut node = root;
    for part in &parts[..parts.len() - 1] {
        let table = node
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("`{path}`: `{part}` is inside a non-table value")))?;
        node = table
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(Default::default()));
    }
    let table = node
        .as_table_mut()
        .ok_or_else(|| Error::Config(format!("`{path}` does not name a table entry")))?;
    let last = parts[parts.len() - 1].to_string();
    let value = match (table.get(&last), value) {
        (Some(toml::Value::Integer(_)), toml::Value::Float(f)) if f.fract() == 0.0 && f.abs() < 9e15 => {
            toml::Value::Integer(f as i64)
        }
        (Some(toml::Value::Float(_)), toml::Value::Integer(i)) => toml::Value::Float(i as f64),
        (_, v) => v,
    };
    table.insert(last, value);
    Ok(())
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.units != UNITS {
            return Err(Error::Config(format!(
                "units must be \"{UNITS}\" (all rates and detunings in natural widths), got \"{}\"",
                self.units
            )));
        }
        self.atom_model()?;
        self.momentum.validate()?;
        match self.kind {
            ExperimentKind::Spectrum => self.validate_spectrum()?,
            ExperimentKind::Pulse => self.validate_pulse()?,
            ExperimentKind::Memory => self.validate_memory()?,
            ExperimentKind::Sweep => {
                if self.sweep.base == ExperimentKind::Sweep {
                    return Err(Error::Config("sweep.base cannot itself be a sweep".into()));
                }
                if self.sweep.axes.len() > 2 {
                    return Err(Error::Config(format!(
                        "at most two sweep axes are supported, got {}",
                        self.sweep.axes.len()
                    )));
                }
                for axis in &self.sweep.axes {
                    if axis.parameter.starts_with("sweep.") || axis.parameter == "kind" || axis.parameter == "units" {
                        return Err(Error::Config(format!("cannot sweep `{}`", axis.parameter)));
                    }
                    axis.points()?;
                }
                let mut base = self.clone();
                base.kind = self.sweep.base;
                base.validate()?;
            }
        }
        Ok(())
    }

    fn validate_spectrum(&self) -> Result<()> {
        let s = &self.spectrum;
        if !(s.start.is_finite() && s.end.is_finite() && s.end > s.start) {
            return Err(Error::Config(format!("spectrum needs start < end, got [{}, {}]", s.start, s.end)));
        }
        if s.points < 2 {
            return Err(Error::Config("spectrum.points must be at least 2".into()));
        }
        if s.models.is_empty() {
            return Err(Error::Config("spectrum.models is empty".into()));
        }
        for d in self.control_detunings() {
            self.control_field_at(d)?;
        }
        Ok(())
    }

    fn validate_pulse(&self) -> Result<()> {
        self.medium.validate()?;
        self.sampling.validate()?;
        if self.pulse.modes.is_empty() {
            return Err(Error::Config("pulse.modes is empty".into()));
        }
        PulseSpec {
            duration: self.pulse.duration,
            shape: self.pulse.shape.clone(),
            carrier_offset: 0.0,
            mode_index: 0,
        }
        .validate()?;
        self.control_field()?;
        Ok(())
    }

    fn validate_memory(&self) -> Result<()> {
        if self.momentum != MomentumDistribution::Frozen {
            return Err(Error::Config(
                "memory runs integrate frozen atoms only; set momentum.kind = \"frozen\"".into(),
            ));
        }
        if self.memory.directions.is_empty() {
            return Err(Error::Config("memory.directions is empty".into()));
        }
        let mut probe = ProtocolConfig::new(
            self.atom_model()?,
            self.control_field()?,
            PulseSpec {
                duration: self.pulse.duration,
                shape: self.pulse.shape.clone(),
                carrier_offset: 0.0,
                mode_index: self.memory.mode,
            },
            self.medium,
        );
        self.fill_protocol(&mut probe);
        probe.validate()
    }

    pub fn atom_model(&self) -> Result<AtomModel> {
        AtomModel::new(HalfInt::try_from(self.atom.nuclear_spin)?, self.atom.hyperfine_splitting)
    }

    pub fn control_field(&self) -> Result<ControlField> {
        self.control_field_at(self.control.detuning)
    }

    fn control_field_at(&self, detuning: f64) -> Result<ControlField> {
        let atom = self.atom_model()?;
        ControlField::new(detuning, self.control.rabi, build_couplings(&atom)?)
    }

    pub fn control_detunings(&self) -> Vec<f64> {
        if self.spectrum.control_detunings.is_empty() {
            vec![self.control.detuning]
        } else {
            self.spectrum.control_detunings.clone()
        }
    }

    pub fn dressed_medium(&self, detuning: f64, model: SpectrumModel) -> Result<DressedMedium> {
        DressedMedium::new(self.atom_model()?, self.control_field_at(detuning)?, self.momentum, model)
    }

    /// Central carrier `w_bar` and, for a peak-referenced carrier, the peak.
    pub fn resolve_carrier(&self) -> Result<(f64, Option<f64>)> {
        let spacing = 2.0 * std::f64::consts::PI / self.pulse.duration;
        match self.pulse.carrier {
            CarrierSpec::Absolute { value } => Ok((value, None)),
            CarrierSpec::RamanPeak { offset, anchor_mode } => {
                let medium = self.dressed_medium(self.control.detuning, SpectrumModel::Full)?;
                let peak = find_resonance_near(&medium, self.control.detuning, 5.0, 0.002)?;
                Ok((peak.center + offset - anchor_mode as f64 * spacing, Some(peak.center)))
            }
        }
    }

    pub fn pulse_spec(&self, carrier: f64, mode: i32) -> PulseSpec {
        PulseSpec {
            duration: self.pulse.duration,
            shape: self.pulse.shape.clone(),
            carrier_offset: carrier,
            mode_index: mode,
        }
    }

    fn fill_protocol(&self, p: &mut ProtocolConfig) {
        let m = &self.memory;
        p.write_off_time = m.write_off_time;
        p.settle_time = m.settle_time;
        p.storage_time = m.storage_time;
        p.read_duration = m.read_duration;
        p.switch_profile = m.switch_profile;
        p.spin_decay = m.spin_decay;
        p.solver = m.solver;
        p.read_direction = m.directions[0];
    }

    pub fn protocol(&self, carrier: f64) -> Result<ProtocolConfig> {
        let mut p = ProtocolConfig::new(
            self.atom_model()?,
            self.control_field()?,
            self.pulse_spec(carrier, self.memory.mode),
            self.medium,
        );
        self.fill_protocol(&mut p);
        p.validate()?;
        Ok(p)
    }
}
