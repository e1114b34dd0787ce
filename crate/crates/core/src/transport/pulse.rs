use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Envelope of the incoming signal on `[0, T)`; zero elsewhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PulseShape {
    /// `theta(t) - theta(t - T)`.
    Rectangular,
    /// `sin^2(pi t / T)`: compactly supported with a continuous derivative.
    SineSquared,
    /// Real envelope samples spread uniformly over `[0, T]`, linearly
    /// interpolated.
    Tabulated { samples: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseSpec {
    /// `T` in units of 1/gamma.
    pub duration: f64,
    pub shape: PulseShape,
    /// Central carrier `Delta_bar_c` relative to the `m -> n` line, in gamma.
    pub carrier_offset: f64,
    /// Mode `q`: carrier shifted by `2 pi q / T`.
    #[serde(default)]
    pub mode_index: i32,
}

impl PulseSpec {
    pub fn rectangular(duration: f64, carrier_offset: f64, mode_index: i32) -> Self {
        PulseSpec {
            duration,
            shape: PulseShape::Rectangular,
            carrier_offset,
            mode_index,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return Err(Error::InvalidParameter(format!("pulse duration must be > 0, got {}", self.duration)));
        }
        if !self.carrier_offset.is_finite() {
            return Err(Error::InvalidParameter("pulse carrier offset is not finite".into()));
        }
        if let PulseShape::Tabulated { samples } = &self.shape {
            if samples.len() < 2 || samples.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidParameter(
                    "tabulated pulse needs at least two finite samples".into(),
                ));
            }
        }
        Ok(())
    }

    /// Mode spacing `2 pi / T`.
    pub fn mode_spacing(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.duration
    }

    /// Carrier of this mode, `Delta_bar_c + 2 pi q / T`.
    pub fn carrier(&self) -> f64 {
        self.carrier_offset + f64::from(self.mode_index) * self.mode_spacing()
    }

    pub fn with_mode(&self, mode_index: i32) -> Self {
        PulseSpec {
            mode_index,
            ..self.clone()
        }
    }

    /// Envelope at time `t`.
    pub fn envelope(&self, t: f64) -> f64 {
        let period = self.duration;
        if !(0.0..period).contains(&t) {
            return 0.0;
        }
        match &self.shape {
            PulseShape::Rectangular => 1.0,
            PulseShape::SineSquared => (std::f64::consts::PI * t / period).sin().powi(2),
            PulseShape::Tabulated { samples } => {
                let pos = t / period * (samples.len() - 1) as f64;
                let i = (pos.floor() as usize).min(samples.len() - 2);
                let frac = pos - i as f64;
                samples[i] * (1.0 - frac) + samples[i + 1] * frac
            }
        }
    }

    /// Envelope in the frame of the central carrier, where mode `q` carries
    /// the factor `exp(-2 pi i q t / T)`.
    pub fn envelope_in_central_frame(&self, t: f64) -> Complex64 {
        let phase = -f64::from(self.mode_index) * self.mode_spacing() * t;
        Complex64::from_polar(self.envelope(t), phase)
    }
}

/// `(1/S) sum_k exp(2 pi i (q1 - q2) k / S)` over one period of `S` samples:
/// the discrete overlap of two carrier modes of a rectangular pulse.
pub fn mode_overlap(samples_per_period: usize, q1: i32, q2: i32) -> Complex64 {
    let s = samples_per_period as f64;
    let dq = f64::from(q1 - q2);
    let sum: Complex64 = (0..samples_per_period)
        .map(|k| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * dq * k as f64 / s))
        .sum();
    sum / s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rectangular_is_half_open() {
        let p = PulseSpec::rectangular(10.0, 0.0, 0);
        assert_eq!(p.envelope(0.0), 1.0);
        assert_eq!(p.envelope(9.999), 1.0);
        assert_eq!(p.envelope(10.0), 0.0);
        assert_eq!(p.envelope(-1e-12), 0.0);
    }

    #[test]
    fn carriers_step_by_mode_spacing() {
        let p = PulseSpec::rectangular(10.0, 50.0, 0);
        let minus = p.with_mode(-1);
        assert!((p.carrier() - minus.carrier() - 0.2 * std::f64::consts::PI).abs() < 1e-14);
    }

    #[test]
    fn tabulated_interpolates() {
        let p = PulseSpec {
            duration: 2.0,
            shape: PulseShape::Tabulated { samples: vec![0.0, 1.0, 0.0] },
            carrier_offset: 0.0,
            mode_index: 0,
        };
        p.validate().unwrap();
        assert!((p.envelope(0.5) - 0.5).abs() < 1e-15);
        assert!((p.envelope(1.0) - 1.0).abs() < 1e-15);
        assert!((p.envelope(1.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn modes_are_orthogonal() {
        assert!((mode_overlap(400, 0, 0) - 1.0).norm() < 1e-15);
        for (a, b) in [(-1, 0), (0, 1), (-1, 1)] {
            assert!(mode_overlap(400, a, b).norm() < 1e-12);
        }
    }
}
