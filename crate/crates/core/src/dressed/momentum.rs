//! Atomic momentum distributions for the susceptibility average.
//!
//! Only the projection of the momentum on the common propagation axis enters
//! the dressed propagators, through the Doppler shift `k p_z / m0` and the
//! recoil energy `hbar k^2 / 2 m0`. Both are carried in units of gamma, so a
//! thermal distribution is described by its rms Doppler shift rather than by
//! a temperature and mass.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One momentum value, expressed through the energy shifts it produces.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MomentumSample {
    /// `hbar k p_z / m0` for the ground-state momentum, in gamma.
    pub doppler: f64,
    /// `hbar^2 k^2 / 2 m0`, in gamma.
    pub recoil: f64,
}

impl MomentumSample {
    pub const REST: MomentumSample = MomentumSample {
        doppler: 0.0,
        recoil: 0.0,
    };

    /// Kinetic energy of the excited atom (momentum `p_z + hbar k`) above
    /// that of the ground atom.
    pub fn excited_kinetic_shift(&self) -> f64 {
        self.doppler + self.recoil
    }

    /// Doppler shift of the control photon re-emitted by an excited atom of
    /// momentum `p' = p + hbar k`: `hbar k.p'/m0` minus the recoil. The Raman
    /// resonance of a co-propagating pair is then free of any kinetic shift.
    pub fn control_doppler(&self) -> f64 {
        self.doppler + self.recoil
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MomentumDistribution {
    /// Atoms at rest; the recoil shift is not applied.
    Frozen,
    /// Maxwell distribution along the beam axis.
    Thermal {
        /// rms Doppler shift `k sqrt(kB T / m0)` in gamma.
        doppler_width: f64,
        /// `hbar k^2 / 2 m0` in gamma.
        #[serde(default)]
        recoil: f64,
        #[serde(default = "default_order")]
        quadrature_order: usize,
    },
}

fn default_order() -> usize {
    32
}

impl Default for MomentumDistribution {
    fn default() -> Self {
        MomentumDistribution::Frozen
    }
}

impl MomentumDistribution {
    pub fn validate(&self) -> Result<()> {
        match *self {
            MomentumDistribution::Frozen => Ok(()),
            MomentumDistribution::Thermal {
                doppler_width,
                recoil,
                quadrature_order,
            } => {
                if !(doppler_width.is_finite() && doppler_width >= 0.0) {
                    return Err(Error::InvalidParameter(format!("doppler_width {doppler_width}")));
                }
                if !(recoil.is_finite() && recoil >= 0.0) {
                    return Err(Error::InvalidParameter(format!("recoil {recoil}")));
                }
                if quadrature_order == 0 || quadrature_order > 200 {
                    return Err(Error::InvalidParameter(format!(
                        "quadrature_order must be in 1..=200, got {quadrature_order}"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Quadrature nodes with weights summing to one.
    pub fn nodes(&self) -> Vec<(f64, MomentumSample)> {
        match *self {
            MomentumDistribution::Frozen => vec![(1.0, MomentumSample::REST)],
            MomentumDistribution::Thermal {
                doppler_width,
                recoil,
                quadrature_order,
            } => {
                let norm = std::f64::consts::PI.sqrt();
                gauss_hermite(quadrature_order)
                    .into_iter()
                    .map(|(x, w)| {
                        (
                            w / norm,
                            MomentumSample {
                                doppler: std::f64::consts::SQRT_2 * doppler_width * x,
                                recoil,
                            },
                        )
                    })
                    .collect()
            }
        }
    }
}

/// Gauss-Hermite nodes and weights for the weight `exp(-x^2)`, by Newton
/// iteration on the orthonormal Hermite recurrence.
pub fn gauss_hermite(n: usize) -> Vec<(f64, f64)> {
    let pim4 = std::f64::consts::PI.powf(-0.25);
    let mut nodes = vec![(0.0, 0.0); n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    let mut z = 0.0_f64;
    for i in 0..m {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * nodes[0].0,
            3 => 1.91 * z - 0.91 * nodes[1].0,
            _ => 2.0 * z - nodes[i - 2].0,
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let step = p1 / pp;
            z -= step;
            if step.abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        let w = 2.0 / (pp * pp);
        nodes[i] = (z, w);
        nodes[n - 1 - i] = (-z, w);
    }
    nodes.sort_by(|a, b| a.0.total_cmp(&b.0));
    nodes
}
