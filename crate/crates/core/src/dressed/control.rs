use serde::{Deserialize, Serialize};

use crate::atomic::CouplingSet;
use crate::error::{Error, Result};

/// Monochromatic sigma-plus control field.
///
/// `detuning` is measured from the `m' -> n` transition and `rabi` is defined
/// on that same transition, `rabi = 2|V(nm')|/hbar`. The coupling to `n'` is
/// fixed by the algebraic ratio carried in `couplings`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlField {
    pub detuning: f64,
    pub rabi: f64,
    pub couplings: CouplingSet,
}

impl ControlField {
    pub fn new(detuning: f64, rabi: f64, couplings: CouplingSet) -> Result<Self> {
        if !detuning.is_finite() {
            return Err(Error::InvalidParameter(format!("control detuning {detuning}")));
        }
        if !(rabi.is_finite() && rabi >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "control Rabi frequency must be finite and >= 0, got {rabi}"
            )));
        }
        if couplings.control_to_n == 0.0 {
            return Err(Error::InvalidParameter(
                "control does not couple m' to n; Rabi frequency is undefined".into(),
            ));
        }
        Ok(ControlField {
            detuning,
            rabi,
            couplings,
        })
    }

    pub fn with_rabi(&self, rabi: f64) -> Result<Self> {
        ControlField::new(self.detuning, rabi, self.couplings)
    }

    pub fn with_detuning(&self, detuning: f64) -> Result<Self> {
        ControlField::new(detuning, self.rabi, self.couplings)
    }

    /// The same field acting on the three-level scheme (no `n'`).
    pub fn lambda_only(&self) -> Self {
        ControlField {
            couplings: self.couplings.lambda_only(),
            ..*self
        }
    }

    /// `V(nm')/hbar`, carrying the sign of the underlying dipole factor.
    pub fn coupling_n(&self) -> f64 {
        0.5 * self.rabi * self.couplings.control_to_n.signum()
    }

    /// `V(n'm')/hbar = rho * V(nm')/hbar`.
    pub fn coupling_nprime(&self) -> f64 {
        self.coupling_n() * self.couplings.control_ratio()
    }

    pub fn rho(&self) -> f64 {
        self.couplings.control_ratio()
    }
}
