//! Control-dressed propagators of the two excited hyperfine states.
//!
//! Everything is in units of gamma with hbar = 1 and the optical zero at the
//! `m -> n` transition, so `E(n) = 0`, `E(n') = Omega_HF` and the control
//! photon carries energy `Delta` above `E(m') = 0`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::control::ControlField;
use super::momentum::MomentumSample;
use crate::atomic::AtomModel;
use crate::error::{Error, Result};

/// Denominators smaller than this (in gamma) are reported as poles.
pub const POLE_TOLERANCE: f64 = 1e-14;

const HALF_WIDTH: Complex64 = Complex64::new(0.0, 0.5);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExcitedState {
    N,
    NPrime,
}

impl ExcitedState {
    fn energy(self, atom: &AtomModel) -> f64 {
        match self {
            ExcitedState::N => atom.energy_n(),
            ExcitedState::NPrime => atom.energy_n_prime(),
        }
    }

    fn coupling(self, control: &ControlField) -> f64 {
        match self {
            ExcitedState::N => control.coupling_n(),
            ExcitedState::NPrime => control.coupling_nprime(),
        }
    }
}

/// Quasi-energies `(E+, E-)` of one excited state dressed by the control
/// alone, as if the other hyperfine state were infinitely far away.
///
/// The square root is taken on the principal branch (non-negative real part).
/// Its argument crosses the negative real axis only for `|V| < gamma/4` at the
/// exact one-photon resonance, where the two roots merely swap labels; the
/// propagators depend on the roots only through their symmetric product.
pub fn quasi_energies(
    atom: &AtomModel,
    control: &ControlField,
    state: ExcitedState,
    p: &MomentumSample,
) -> [Complex64; 2] {
    let e_j = state.energy(atom);
    let v = state.coupling(control);
    let kp = p.control_doppler();
    let mid = p.excited_kinetic_shift() + 0.5 * (Complex64::from(control.detuning - kp + e_j) - HALF_WIDTH);
    let offset = Complex64::from(e_j - control.detuning + kp) - HALF_WIDTH;
    let root = (Complex64::from(v * v) + 0.25 * offset * offset).sqrt();
    [mid + root, mid - root]
}

/// The 2x2 block `G(n1, n2)` of dressed excited-state propagators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DressedGreens {
    pub nn: Complex64,
    /// `G(n, n')`
    pub n_np: Complex64,
    /// `G(n', n)`
    pub np_n: Complex64,
    pub np_np: Complex64,
}

impl DressedGreens {
    /// `sum_{n1 n2} a(n1) b(n2) G(n1, n2)` for real probe factors.
    pub fn contract(&self, a: [f64; 2], b: [f64; 2]) -> Complex64 {
        self.nn * a[0] * b[0] + self.n_np * a[0] * b[1] + self.np_n * a[1] * b[0] + self.np_np * a[1] * b[1]
    }

    pub fn scale(&self, w: f64) -> DressedGreens {
        DressedGreens {
            nn: self.nn * w,
            n_np: self.n_np * w,
            np_n: self.np_n * w,
            np_np: self.np_np * w,
        }
    }

    pub fn add(&self, o: &DressedGreens) -> DressedGreens {
        DressedGreens {
            nn: self.nn + o.nn,
            n_np: self.n_np + o.n_np,
            np_n: self.np_n + o.np_n,
            np_np: self.np_np + o.np_np,
        }
    }

    fn zero() -> DressedGreens {
        DressedGreens::default()
    }
}

impl Default for DressedGreens {
    fn default() -> Self {
        let z = Complex64::new(0.0, 0.0);
        DressedGreens {
            nn: z,
            n_np: z,
            np_n: z,
            np_np: z,
        }
    }
}

fn checked(z: Complex64) -> Result<Complex64> {
    let modulus = z.norm();
    if !(modulus >= POLE_TOLERANCE) {
        return Err(Error::Pole { modulus });
    }
    Ok(z)
}

/// Intermediate quantities shared by the propagators and their derivative.
///
/// With `a_j = E - E_j - kinetic + i/2` and `Q_j = (E - E_j+)(E - E_j-)`, the
/// closed forms reduce to an adjugate over one common determinant,
/// `det = a_n Q_n' - V_n^2 a_n' = a_n' Q_n - V_n'^2 a_n`; only its zeros are
/// poles. The `Q_j` zeros are removable.
struct Resolvent {
    q_n: Complex64,
    q_np: Complex64,
    dq_n: Complex64,
    dq_np: Complex64,
    det: Complex64,
    cross: f64,
    v_n: f64,
    a_n: Complex64,
}

/// Excited-state denominators `a_j` when the control is off; the photon level
/// then decouples and contributes a spurious zero to the determinant.
fn undressed(atom: &AtomModel, control: &ControlField, energy: Complex64, p: &MomentumSample) -> Option<[Complex64; 2]> {
    if control.coupling_n() != 0.0 || control.coupling_nprime() != 0.0 {
        return None;
    }
    let shift = p.excited_kinetic_shift();
    Some([
        energy - shift - atom.energy_n() + HALF_WIDTH,
        energy - shift - atom.energy_n_prime() + HALF_WIDTH,
    ])
}

fn resolvent(atom: &AtomModel, control: &ControlField, energy: Complex64, p: &MomentumSample) -> Result<Resolvent> {
    let shift = p.excited_kinetic_shift();
    let a_n = energy - shift - atom.energy_n() + HALF_WIDTH;
    let a_np = energy - shift - atom.energy_n_prime() + HALF_WIDTH;
    let [np_plus, np_minus] = quasi_energies(atom, control, ExcitedState::NPrime, p);
    let [n_plus, n_minus] = quasi_energies(atom, control, ExcitedState::N, p);
    let q_np = (energy - np_plus) * (energy - np_minus);
    let q_n = (energy - n_plus) * (energy - n_minus);
    let v_n = control.coupling_n();
    let v_np = control.coupling_nprime();
    let det = checked(a_n * q_np - v_n * v_n * a_np)?;
    Ok(Resolvent {
        q_n,
        q_np,
        dq_n: 2.0 * energy - n_plus - n_minus,
        dq_np: 2.0 * energy - np_plus - np_minus,
        det,
        cross: v_n * v_np,
        v_n,
        a_n,
    })
}

/// Dressed propagators at (possibly complex) energy `energy`, measured on
/// shell as `Delta_bar` plus the ground-state kinetic energy.
///
/// `G(n,n) = 1 / (a_n - V_n^2 a_n' / Q_n')` carries the level repulsion from
/// `n'` through the `n'` quasi-energy pair, and vice versa; the off-diagonal
/// entries are `V(nm') V(n'm') G(n,n) / Q_n'`, symmetric under `n <-> n'`.
pub fn greens_matrix(
    atom: &AtomModel,
    control: &ControlField,
    energy: Complex64,
    p: &MomentumSample,
) -> Result<DressedGreens> {
    if let Some([a_n, a_np]) = undressed(atom, control, energy, p) {
        return Ok(DressedGreens {
            nn: checked(a_n)?.inv(),
            np_np: checked(a_np)?.inv(),
            ..DressedGreens::default()
        });
    }
    let r = resolvent(atom, control, energy, p)?;
    let inv = r.det.inv();
    let off = r.cross * inv;
    Ok(DressedGreens {
        nn: r.q_np * inv,
        np_n: off,
        n_np: off,
        np_np: r.q_n * inv,
    })
}

/// `dG/dE`, from differentiating the closed forms of [`greens_matrix`].
pub fn greens_matrix_derivative(
    atom: &AtomModel,
    control: &ControlField,
    energy: Complex64,
    p: &MomentumSample,
) -> Result<DressedGreens> {
    if let Some([a_n, a_np]) = undressed(atom, control, energy, p) {
        let (g_n, g_np) = (checked(a_n)?.inv(), checked(a_np)?.inv());
        return Ok(DressedGreens {
            nn: -g_n * g_n,
            np_np: -g_np * g_np,
            ..DressedGreens::default()
        });
    }
    let r = resolvent(atom, control, energy, p)?;
    // d(det)/dE with a_n' = 1 and a_n'' = 0.
    let d_det = r.q_np + r.a_n * r.dq_np - r.v_n * r.v_n;
    let inv = r.det.inv();
    let inv2 = inv * inv;
    let off = -r.cross * d_det * inv2;
    Ok(DressedGreens {
        nn: (r.dq_np * r.det - r.q_np * d_det) * inv2,
        np_n: off,
        n_np: off,
        np_np: (r.dq_n * r.det - r.q_n * d_det) * inv2,
    })
}

/// Momentum-weighted sum of propagators over quadrature nodes.
pub(crate) fn averaged<F>(nodes: &[(f64, MomentumSample)], mut f: F) -> Result<DressedGreens>
where
    F: FnMut(&MomentumSample) -> Result<DressedGreens>,
{
    let mut acc = DressedGreens::zero();
    for (w, p) in nodes {
        acc = acc.add(&f(p)?.scale(*w));
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atomic::build_couplings;

    fn setup(detuning: f64, rabi: f64) -> (AtomModel, ControlField) {
        let atom = AtomModel::cesium_d1();
        let c = build_couplings(&atom).unwrap();
        (atom, ControlField::new(detuning, rabi, c).unwrap())
    }

    #[test]
    fn control_off_gives_bare_resonances() {
        let (atom, control) = setup(3.0, 0.0);
        for x in [-4.0, 0.0, 0.3, 100.0, 256.0] {
            let g = greens_matrix(&atom, &control, Complex64::from(x), &MomentumSample::REST).unwrap();
            let expected_n = (Complex64::new(x, 0.5)).inv();
            let expected_np = (Complex64::new(x - 256.0, 0.5)).inv();
            assert!((g.nn - expected_n).norm() < 1e-14);
            assert!((g.np_np - expected_np).norm() < 1e-14);
            assert_eq!(g.np_n, Complex64::new(0.0, 0.0));
            assert_eq!(g.n_np, Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn quasi_energies_without_control() {
        let (atom, control) = setup(7.0, 0.0);
        let [a, b] = quasi_energies(&atom, &control, ExcitedState::N, &MomentumSample::REST);
        let mut roots = [a, b];
        roots.sort_by(|x, y| x.im.total_cmp(&y.im));
        // One root is the undressed photon level at Delta, the other the damped excited state.
        assert!((roots[1] - Complex64::new(7.0, 0.0)).norm() < 1e-14);
        assert!((roots[0] - Complex64::new(0.0, -0.5)).norm() < 1e-14);
    }

    #[test]
    fn resonant_splitting_approaches_rabi() {
        let (atom, control) = setup(0.0, 200.0);
        let [a, b] = quasi_energies(&atom, &control, ExcitedState::N, &MomentumSample::REST);
        assert!(((a - b).re - 200.0).abs() < 1e-3);
    }

    #[test]
    fn poles_in_lower_half_plane() {
        for (d, r) in [(0.0, 15.0), (50.0, 15.0), (-50.0, 15.0), (0.0, 0.3)] {
            let (atom, control) = setup(d, r);
            for state in [ExcitedState::N, ExcitedState::NPrime] {
                for e in quasi_energies(&atom, &control, state, &MomentumSample::REST) {
                    assert!(e.im <= 1e-15, "{e}");
                }
            }
        }
    }

    #[test]
    fn pole_is_flagged() {
        let (atom, control) = setup(0.0, 0.0);
        let err = greens_matrix(&atom, &control, Complex64::new(0.0, -0.5), &MomentumSample::REST);
        assert!(matches!(err, Err(Error::Pole { .. })));
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let (atom, control) = setup(50.0, 15.0);
        let p = MomentumSample { doppler: 0.3, recoil: 0.01 };
        for x in [-8.0, 0.2, 45.0, 49.3, 260.0] {
            let h = 1e-5;
            let gp = greens_matrix(&atom, &control, Complex64::from(x + h), &p).unwrap();
            let gm = greens_matrix(&atom, &control, Complex64::from(x - h), &p).unwrap();
            let d = greens_matrix_derivative(&atom, &control, Complex64::from(x), &p).unwrap();
            let fd = |a: Complex64, b: Complex64| (a - b) / (2.0 * h);
            for (an, num) in [
                (d.nn, fd(gp.nn, gm.nn)),
                (d.np_n, fd(gp.np_n, gm.np_n)),
                (d.n_np, fd(gp.n_np, gm.n_np)),
                (d.np_np, fd(gp.np_np, gm.np_np)),
            ] {
                assert!((an - num).norm() <= 1e-6 * (1.0 + an.norm()), "x={x}: {an} vs {num}");
            }
        }
    }
}
