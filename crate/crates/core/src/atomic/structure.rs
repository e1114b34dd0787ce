//! D1-line level scheme and the dipole factors that couple its four working
//! states.
//!
//! The atoms sit in `m = {F+, M = F+}` of the upper ground hyperfine level.
//! A sigma-minus probe connects `m` to `n = {F'-, F+ - 1}` and
//! `n' = {F'+, F+ - 1}`; a sigma-plus control connects the same two excited
//! states to `m' = {F+, F+ - 2}`. Energies are in units of hbar*gamma with
//! the `m -> n` transition frequency as the optical zero.

use serde::{Deserialize, Serialize};

use super::wigner::{wigner_3j, wigner_6j, HalfInt};
use crate::error::{Error, Result};

/// Hyperfine splitting of the cesium 6P1/2 level, 1168 MHz, in units of the
/// D1 natural width.
pub const CESIUM_D1_HYPERFINE_SPLITTING: f64 = 256.0;

/// Nuclear spin of 133Cs.
pub const CESIUM_NUCLEAR_SPIN: HalfInt = HalfInt::from_doubled(7);

/// Electronic angular momentum of both D1 levels (S1/2 and P1/2).
pub const D1_ELECTRONIC_J: HalfInt = HalfInt::HALF;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomModel {
    pub nuclear_spin: HalfInt,
    /// Excited-state hyperfine splitting `E(n') - E(n)` in units of gamma.
    pub hyperfine_splitting: f64,
}

/// A hyperfine Zeeman sublevel `|F, M>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sublevel {
    pub f: HalfInt,
    pub m: HalfInt,
}

impl Sublevel {
    fn exists(self) -> bool {
        self.f.doubled() >= 0 && self.m.abs() <= self.f && (self.f - self.m).is_integer()
    }
}

impl Default for AtomModel {
    fn default() -> Self {
        AtomModel::cesium_d1()
    }
}

impl AtomModel {
    pub fn new(nuclear_spin: HalfInt, hyperfine_splitting: f64) -> Result<Self> {
        let atom = AtomModel {
            nuclear_spin,
            hyperfine_splitting,
        };
        atom.validate()?;
        Ok(atom)
    }

    pub fn cesium_d1() -> Self {
        AtomModel {
            nuclear_spin: CESIUM_NUCLEAR_SPIN,
            hyperfine_splitting: CESIUM_D1_HYPERFINE_SPLITTING,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nuclear_spin.doubled() <= 0 {
            return Err(Error::InvalidAtom(format!(
                "nuclear spin must be positive, got {}",
                self.nuclear_spin
            )));
        }
        if !(self.hyperfine_splitting.is_finite() && self.hyperfine_splitting > 0.0) {
            return Err(Error::InvalidAtom(format!(
                "hyperfine splitting must be positive and finite, got {}",
                self.hyperfine_splitting
            )));
        }
        Ok(())
    }

    /// `F+ = I + 1/2`, shared by the ground and excited manifolds.
    pub fn f_upper(&self) -> HalfInt {
        self.nuclear_spin + D1_ELECTRONIC_J
    }

    /// `F'- = I - 1/2`.
    pub fn f_lower(&self) -> HalfInt {
        self.nuclear_spin - D1_ELECTRONIC_J
    }

    pub fn state_m(&self) -> Sublevel {
        let f = self.f_upper();
        Sublevel { f, m: f }
    }

    pub fn state_m_prime(&self) -> Sublevel {
        let f = self.f_upper();
        Sublevel {
            f,
            m: f - HalfInt::integer(2),
        }
    }

    pub fn state_n(&self) -> Sublevel {
        Sublevel {
            f: self.f_lower(),
            m: self.f_upper() - HalfInt::ONE,
        }
    }

    pub fn state_n_prime(&self) -> Sublevel {
        Sublevel {
            f: self.f_upper(),
            m: self.f_upper() - HalfInt::ONE,
        }
    }

    pub fn energy_n(&self) -> f64 {
        0.0
    }

    pub fn energy_n_prime(&self) -> f64 {
        self.energy_n() + self.hyperfine_splitting
    }

    /// Ground sublevels are degenerate and define the energy zero.
    pub fn ground_energy(&self) -> f64 {
        0.0
    }
}

/// Dimensionless dipole factors `<e| d_q |g>` in units of the single-line
/// reduced element `|<J'||d||J>| / sqrt(2J'+1)`, so that the squared factors
/// out of any excited sublevel sum to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingSet {
    /// Sigma-minus probe, `m -> n`.
    pub probe_to_n: f64,
    /// Sigma-minus probe, `m -> n'`.
    pub probe_to_nprime: f64,
    /// Sigma-plus control, `m' -> n`.
    pub control_to_n: f64,
    /// Sigma-plus control, `m' -> n'`.
    pub control_to_nprime: f64,
    /// Sigma-plus control out of the populated state; zero by the stretched-state rule.
    pub control_from_m: f64,
}

impl CouplingSet {
    /// `rho = V(n'm') / V(nm')`, signed.
    pub fn control_ratio(&self) -> f64 {
        self.control_to_nprime / self.control_to_n
    }

    /// `(d.e)(n'm) / (d.e)(nm)`, signed.
    pub fn probe_ratio(&self) -> f64 {
        self.probe_to_nprime / self.probe_to_n
    }

    /// The idealized three-level scheme: `n'` removed from both fields.
    pub fn lambda_only(&self) -> CouplingSet {
        CouplingSet {
            probe_to_nprime: 0.0,
            control_to_nprime: 0.0,
            ..*self
        }
    }
}

/// `<J'=1/2, I, F', M'| d_q |J=1/2, I, F, M>` in units of the reduced element
/// per excited sublevel.
pub fn d1_dipole_factor(nuclear_spin: HalfInt, excited: Sublevel, ground: Sublevel, q: i32) -> f64 {
    let j = D1_ELECTRONIC_J;
    let one = HalfInt::ONE;
    let q = HalfInt::integer(q);
    if excited.m != ground.m + q {
        return 0.0;
    }
    // Wigner-Eckart in F, then decoupling of the nuclear spin:
    // <F'||d||F> = (-1)^(J'+I+F+1) sqrt((2F'+1)(2F+1)) {J' F' I; F J 1} <J'||d||J>.
    let three_j = wigner_3j(excited.f, one, ground.f, -excited.m, q, ground.m);
    let six_j = wigner_6j(j, excited.f, nuclear_spin, ground.f, j, one);
    let phase_3j = parity((excited.f - excited.m).doubled() / 2);
    let phase_6j = parity((j + nuclear_spin + ground.f + one).doubled() / 2);
    let reduced_f = f64::from((excited.f.doubled() + 1) * (ground.f.doubled() + 1)).sqrt();
    // <J'||d||J> = sqrt(2J'+1) in the chosen units.
    let reduced_j = f64::from(j.doubled() + 1).sqrt();
    phase_3j * phase_6j * three_j * reduced_f * six_j * reduced_j
}

fn parity(k: i32) -> f64 {
    if k.rem_euclid(2) == 1 {
        -1.0
    } else {
        1.0
    }
}

/// Dipole factors for the sigma-minus probe and sigma-plus control.
pub fn build_couplings(atom: &AtomModel) -> Result<CouplingSet> {
    atom.validate()?;
    let states = [
        ("m", atom.state_m()),
        ("m'", atom.state_m_prime()),
        ("n", atom.state_n()),
        ("n'", atom.state_n_prime()),
    ];
    for (label, s) in states {
        if !s.exists() {
            return Err(Error::MissingState {
                label,
                f: s.f.value(),
                m: s.m.value(),
            });
        }
    }
    let i = atom.nuclear_spin;
    let (m, m_prime, n, n_prime) = (states[0].1, states[1].1, states[2].1, states[3].1);

    // The sigma-plus control would have to reach M' = F+ + 1 from m, which no
    // excited sublevel of F' <= F+ carries.
    let stretched_target = Sublevel {
        f: atom.f_upper(),
        m: m.m + HalfInt::ONE,
    };
    let control_from_m = if stretched_target.exists() {
        d1_dipole_factor(i, stretched_target, m, 1)
    } else {
        0.0
    };

    Ok(CouplingSet {
        probe_to_n: d1_dipole_factor(i, n, m, -1),
        probe_to_nprime: d1_dipole_factor(i, n_prime, m, -1),
        control_to_n: d1_dipole_factor(i, n, m_prime, 1),
        control_to_nprime: d1_dipole_factor(i, n_prime, m_prime, 1),
        control_from_m,
    })
}
