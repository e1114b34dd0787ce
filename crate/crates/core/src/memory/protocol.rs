use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::bloch::{evolve, AtomicState, BlochCoefficients, Drive, SolverSettings, Trajectory};
use crate::atomic::AtomModel;
use crate::dressed::ControlField;
use crate::error::{Error, Result};
use crate::transport::{FieldRecord, MediumSpec, PulseSpec};

/// Residual optical excitation, relative to the stored spin excitation,
/// above which the extraction time is reported as premature.
pub const RESIDUAL_WARNING_RATIO: f64 = 1e-4;

/// Shortest accepted wait between control switch-off and extraction.
pub const MIN_SETTLE_TIME: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReadDirection {
    Forward,
    Backward,
}

impl ReadDirection {
    pub fn label(self) -> &'static str {
        match self {
            ReadDirection::Forward => "forward",
            ReadDirection::Backward => "backward",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SwitchProfile {
    Instantaneous,
    /// Linear ramp of the control amplitude over `ramp_time`.
    Linear { ramp_time: f64 },
}

impl SwitchProfile {
    fn ramp(self) -> f64 {
        match self {
            SwitchProfile::Instantaneous => 0.0,
            SwitchProfile::Linear { ramp_time } => ramp_time,
        }
    }

    /// Control strength `t` after the start of a switch-off.
    fn off(self, t: f64) -> f64 {
        match self {
            _ if t < 0.0 => 1.0,
            SwitchProfile::Instantaneous => 0.0,
            SwitchProfile::Linear { ramp_time } => (1.0 - t / ramp_time).max(0.0),
        }
    }

    fn on(self, t: f64) -> f64 {
        if t < 0.0 {
            0.0
        } else {
            1.0 - self.off(t)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub atom: AtomModel,
    pub control: ControlField,
    pub pulse: PulseSpec,
    pub medium: MediumSpec,
    /// Control switch-off during write-in; defaults to the pulse duration.
    pub write_off_time: Option<f64>,
    /// Wait after switch-off before extraction; at least [`MIN_SETTLE_TIME`].
    pub settle_time: f64,
    /// Additional dark interval before read-out.
    pub storage_time: f64,
    pub read_duration: f64,
    pub read_direction: ReadDirection,
    pub switch_profile: SwitchProfile,
    /// Ground-coherence decay rate.
    pub spin_decay: f64,
    pub solver: SolverSettings,
}

impl ProtocolConfig {
    pub fn new(atom: AtomModel, control: ControlField, pulse: PulseSpec, medium: MediumSpec) -> Self {
        ProtocolConfig {
            atom,
            control,
            pulse,
            medium,
            write_off_time: None,
            settle_time: 20.0,
            storage_time: 0.0,
            read_duration: 60.0,
            read_direction: ReadDirection::Backward,
            switch_profile: SwitchProfile::Instantaneous,
            spin_decay: 0.0,
            solver: SolverSettings::default(),
        }
    }

    pub fn write_off(&self) -> f64 {
        self.write_off_time.unwrap_or(self.pulse.duration)
    }

    pub fn validate(&self) -> Result<()> {
        self.atom.validate()?;
        self.pulse.validate()?;
        self.medium.validate()?;
        self.solver.validate()?;
        let nonneg = |name: &str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} must be finite and >= 0, got {v}")))
            }
        };
        nonneg("write_off_time", self.write_off())?;
        nonneg("storage_time", self.storage_time)?;
        nonneg("read_duration", self.read_duration)?;
        nonneg("spin_decay", self.spin_decay)?;
        if !(self.settle_time >= MIN_SETTLE_TIME) {
            return Err(Error::InvalidParameter(format!(
                "settle_time must be >= {MIN_SETTLE_TIME}, got {}",
                self.settle_time
            )));
        }
        if let SwitchProfile::Linear { ramp_time } = self.switch_profile {
            if !(ramp_time.is_finite() && ramp_time > 0.0) {
                return Err(Error::InvalidParameter(format!("ramp_time must be > 0, got {ramp_time}")));
            }
        }
        Ok(())
    }

    pub fn coefficients(&self) -> Result<BlochCoefficients> {
        BlochCoefficients::new(
            &self.atom,
            &self.control,
            self.pulse.carrier(),
            self.medium.depth,
            self.spin_decay,
        )
    }

    /// End of the storage stage.
    pub fn extraction_time(&self) -> f64 {
        self.write_off() + self.switch_profile.ramp() + self.settle_time + self.storage_time
    }

    fn steps(&self, span: f64) -> usize {
        (span / self.solver.time_step - 1e-9).ceil().max(0.0) as usize
    }
}

/// Spin wave `sigma(zeta)`, scaled so that `int |sigma|^2 dzeta` is in units
/// of the pulse energy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinWave {
    pub zeta: Vec<f64>,
    pub sigma: Vec<Complex64>,
}

impl SpinWave {
    fn from_state(state: &AtomicState, depth: f64) -> Self {
        let scale = (2.0 * std::f64::consts::PI * depth).sqrt();
        SpinWave {
            zeta: state.zeta(),
            sigma: state.spin().iter().map(|s| s * scale).collect(),
        }
    }

    /// Energy-weighted mean position.
    pub fn centroid(&self) -> f64 {
        let (num, den) = self
            .zeta
            .iter()
            .zip(&self.sigma)
            .fold((0.0, 0.0), |(n, d), (z, s)| (n + z * s.norm_sqr(), d + s.norm_sqr()));
        if den == 0.0 {
            f64::NAN
        } else {
            num / den
        }
    }
}

/// Write-in result: the medium state at extraction time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoredState {
    pub state: AtomicState,
    pub time: f64,
    pub input_energy: f64,
    pub leakage_energy: f64,
    pub dissipated: f64,
    pub write_waveform: FieldRecord,
    pub max_error_estimate: f64,
    pub warnings: Vec<String>,
}

/// Energy flows of one protocol run, all in units of the pulse energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBudget {
    pub input: f64,
    pub leakage: f64,
    pub write_dissipated: f64,
    /// Spin plus optical excitation at extraction time.
    pub stored: f64,
    pub retrieved: f64,
    pub read_dissipated: f64,
    /// Excitation left in the medium after read-out.
    pub remaining: f64,
}

impl EnergyBudget {
    /// `input - leakage - write_dissipated - stored`; zero up to the
    /// discretization error.
    pub fn write_imbalance(&self) -> f64 {
        self.input - self.leakage - self.write_dissipated - self.stored
    }

    pub fn read_imbalance(&self) -> f64 {
        self.stored - self.retrieved - self.read_dissipated - self.remaining
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemoryReport {
    pub direction: ReadDirection,
    /// Exit energy during write-in and storage over the input energy.
    pub leakage: f64,
    /// Retrieved energy over the input energy.
    pub efficiency: f64,
    /// Spin-wave energy at extraction over the input energy.
    pub stored_fraction: f64,
    pub spin_wave: SpinWave,
    pub write_waveform: FieldRecord,
    pub retrieved_waveform: FieldRecord,
    pub budget: EnergyBudget,
    pub solver: SolverSettings,
    pub max_error_estimate: f64,
    pub warnings: Vec<String>,
}

/// Scalar part of a report, for sidecars and sweep tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemorySummary {
    pub direction: ReadDirection,
    pub leakage: f64,
    pub efficiency: f64,
    pub stored_fraction: f64,
    pub spin_wave_centroid: f64,
    pub budget: EnergyBudget,
    pub solver: SolverSettings,
    pub max_error_estimate: f64,
    pub warnings: Vec<String>,
}

impl MemoryReport {
    pub fn summary(&self) -> MemorySummary {
        MemorySummary {
            direction: self.direction,
            leakage: self.leakage,
            efficiency: self.efficiency,
            stored_fraction: self.stored_fraction,
            spin_wave_centroid: self.spin_wave.centroid(),
            budget: self.budget,
            solver: self.solver,
            max_error_estimate: self.max_error_estimate,
            warnings: self.warnings.clone(),
        }
    }
}

fn record(tr: &Trajectory) -> FieldRecord {
    FieldRecord {
        times: tr.times.clone(),
        input: tr.entrance.clone(),
        output: tr.exit.clone(),
        slices: Vec::new(),
        input_energy: tr.entrance_energy,
        output_energy: tr.exit_energy,
        window: None,
        warnings: Vec::new(),
    }
}

/// Write-in with the control on until the switch-off time, then a dark wait
/// until the optical coherences have decayed.
pub fn store(config: &ProtocolConfig) -> Result<StoredState> {
    config.validate()?;
    let coeffs = config.coefficients()?;
    let pulse = &config.pulse;
    let t_off = config.write_off();
    let profile = config.switch_profile;
    let input = |t: f64| Complex64::from(pulse.envelope(t));
    let control = |t: f64| profile.off(t - t_off);
    let drive = Drive {
        input: &input,
        control: &control,
        breakpoints: vec![0.0, pulse.duration, t_off, t_off + profile.ramp()],
    };
    let t_end = config.extraction_time();
    let tr = evolve(
        &coeffs,
        &config.solver,
        &AtomicState::zeros(config.solver.cells),
        0.0,
        config.steps(t_end),
        &drive,
        None,
    )?;

    let mut warnings = Vec::new();
    let depth = config.medium.depth;
    let spin = tr.final_state.spin_energy(depth);
    let optical = tr.final_state.optical_energy(depth);
    if optical > RESIDUAL_WARNING_RATIO * spin && optical > 0.0 {
        let msg = format!(
            "residual optical excitation {optical:.3e} exceeds {RESIDUAL_WARNING_RATIO:.0e} of the spin excitation {spin:.3e} at extraction"
        );
        log::warn!("{msg}");
        warnings.push(msg);
    }
    Ok(StoredState {
        time: tr.times.last().copied().unwrap_or(0.0),
        input_energy: tr.entrance_energy,
        leakage_energy: tr.exit_energy,
        dissipated: tr.dissipated,
        write_waveform: record(&tr),
        max_error_estimate: tr.max_error_estimate,
        state: tr.final_state,
        warnings,
    })
}

/// Read-out with the control switched back on and no probe input.
///
/// Backward retrieval mirrors the stored coherences, `zeta -> 1 - zeta`, and
/// runs the same forward solver.
pub fn retrieve(config: &ProtocolConfig, stored: &StoredState, direction: ReadDirection) -> Result<MemoryReport> {
    config.validate()?;
    let coeffs = config.coefficients()?;
    let profile = config.switch_profile;
    let t0 = stored.time;
    let initial = match direction {
        ReadDirection::Forward => stored.state.clone(),
        ReadDirection::Backward => stored.state.mirrored(),
    };
    let input = |_: f64| Complex64::from(0.0);
    let control = |t: f64| profile.on(t - t0);
    let drive = Drive {
        input: &input,
        control: &control,
        breakpoints: vec![t0, t0 + profile.ramp()],
    };
    let tr = evolve(
        &coeffs,
        &config.solver,
        &initial,
        t0,
        config.steps(config.read_duration),
        &drive,
        None,
    )?;

    let depth = config.medium.depth;
    let input_energy = stored.input_energy;
    let frac = |x: f64| if input_energy > 0.0 { x / input_energy } else { 0.0 };
    let stored_spin = stored.state.spin_energy(depth);
    let stored_total = stored_spin + stored.state.optical_energy(depth);
    let remaining = tr.final_state.spin_energy(depth) + tr.final_state.optical_energy(depth);
    Ok(MemoryReport {
        direction,
        leakage: frac(stored.leakage_energy),
        efficiency: frac(tr.exit_energy),
        stored_fraction: frac(stored_spin),
        spin_wave: SpinWave::from_state(&stored.state, depth),
        write_waveform: stored.write_waveform.clone(),
        retrieved_waveform: record(&tr),
        budget: EnergyBudget {
            input: 1.0,
            leakage: frac(stored.leakage_energy),
            write_dissipated: frac(stored.dissipated),
            stored: frac(stored_total),
            retrieved: frac(tr.exit_energy),
            read_dissipated: frac(tr.dissipated),
            remaining: frac(remaining),
        },
        solver: config.solver,
        max_error_estimate: stored.max_error_estimate.max(tr.max_error_estimate),
        warnings: stored.warnings.clone(),
    })
}

/// Store, then read out in the configured direction.
pub fn run_protocol(config: &ProtocolConfig) -> Result<MemoryReport> {
    let stored = store(config)?;
    retrieve(config, &stored, config.read_direction)
}

/// One write-in, read out both ways: `(forward, backward)`.
pub fn run_both_directions(config: &ProtocolConfig) -> Result<(MemoryReport, MemoryReport)> {
    let stored = store(config)?;
    Ok((
        retrieve(config, &stored, ReadDirection::Forward)?,
        retrieve(config, &stored, ReadDirection::Backward)?,
    ))
}
