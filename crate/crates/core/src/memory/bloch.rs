//! Linearized Maxwell-Bloch equations for the probe and the three atomic
//! coherences, in the frame co-moving with the probe.
//!
//! With `zeta = z / L` and time in 1/gamma:
//!
//! ```text
//! d_zeta a = i 2 pi b0 sum_j c_j P_j
//! d_t P_j  = (i delta_j - 1/2) P_j + i c_j a + i u(t) v_j S
//! d_t S    = (i delta_S - Gamma) S + i u(t) sum_j v_j P_j
//! ```
//!
//! `c_j = sqrt(3/4) f_j` with the signed probe factors `f_j`, so adiabatic
//! elimination reproduces the scaled susceptibility of the dressed medium.
//! The field equation is integrated exactly along `zeta` (cumulative
//! trapezoid) and the coherences by classical fourth-order Runge-Kutta.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::atomic::AtomModel;
use crate::dressed::{ControlField, DIPOLE_SCALE};
use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Constant coefficients of the equations for one carrier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochCoefficients {
    /// Probe couplings `c_n, c_n'`.
    pub probe: [f64; 2],
    /// Carrier detunings from `n` and `n'`.
    pub detuning: [f64; 2],
    /// Full-strength control couplings `V(nm'), V(n'm')`.
    pub control: [f64; 2],
    /// Two-photon detuning `Delta_bar_c - Delta`.
    pub two_photon: f64,
    pub spin_decay: f64,
    /// `b0`.
    pub depth: f64,
}

impl BlochCoefficients {
    pub fn new(atom: &AtomModel, control: &ControlField, carrier: f64, depth: f64, spin_decay: f64) -> Result<Self> {
        if !(spin_decay.is_finite() && spin_decay >= 0.0) {
            return Err(Error::InvalidParameter(format!("spin_decay must be >= 0, got {spin_decay}")));
        }
        let scale = DIPOLE_SCALE.sqrt();
        Ok(BlochCoefficients {
            probe: [scale * control.couplings.probe_to_n, scale * control.couplings.probe_to_nprime],
            detuning: [carrier - atom.energy_n(), carrier - atom.energy_n_prime()],
            control: [control.coupling_n(), control.coupling_nprime()],
            two_photon: carrier - control.detuning,
            spin_decay,
            depth,
        })
    }

    fn field_gain(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.depth
    }

    /// Response `sum_j c_j P_j / a` of a single atom to a stationary sideband
    /// `W`, with the control held at full strength.
    ///
    /// Solves the 3x3 linear system obtained by setting `d_t -> -i W`.
    pub fn stationary_response(&self, sideband: f64) -> Result<Complex64> {
        // (W + delta_j + i/2) P_j + v_j S = -c_j a
        // (W + delta_S + i Gamma) S + sum_j v_j P_j = 0
        let d = |delta: f64, width: f64| Complex64::new(sideband + delta, width);
        let m = [
            [d(self.detuning[0], 0.5), Complex64::from(0.0), Complex64::from(self.control[0])],
            [Complex64::from(0.0), d(self.detuning[1], 0.5), Complex64::from(self.control[1])],
            [
                Complex64::from(self.control[0]),
                Complex64::from(self.control[1]),
                d(self.two_photon, self.spin_decay),
            ],
        ];
        let rhs = [Complex64::from(-self.probe[0]), Complex64::from(-self.probe[1]), Complex64::from(0.0)];
        let x = solve3(m, rhs)?;
        Ok(self.probe[0] * x[0] + self.probe[1] * x[1])
    }
}

/// Gaussian elimination with partial pivoting.
fn solve3(mut m: [[Complex64; 3]; 3], mut b: [Complex64; 3]) -> Result<[Complex64; 3]> {
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&a, &c| m[a][col].norm().total_cmp(&m[c][col].norm()))
            .unwrap_or(col);
        if m[pivot][col].norm() < 1e-300 {
            return Err(Error::Pole {
                modulus: m[pivot][col].norm(),
            });
        }
        m.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            for k in col..3 {
                let sub = f * m[col][k];
                m[row][k] -= sub;
            }
            let sub = f * b[col];
            b[row] -= sub;
        }
    }
    let mut x = [Complex64::from(0.0); 3];
    for row in (0..3).rev() {
        let mut acc = b[row];
        for k in row + 1..3 {
            acc -= m[row][k] * x[k];
        }
        x[row] = acc / m[row][row];
    }
    Ok(x)
}

/// Coherences on the `zeta` grid: `P_n`, `P_n'` and the spin coherence `S`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomicState {
    /// Packed as `[P_n | P_n' | S]`, each of length `cells + 1`.
    data: Vec<Complex64>,
    points: usize,
}

impl AtomicState {
    pub fn zeros(cells: usize) -> Self {
        AtomicState {
            data: vec![Complex64::from(0.0); 3 * (cells + 1)],
            points: cells + 1,
        }
    }

    pub fn from_parts(p_n: Vec<Complex64>, p_nprime: Vec<Complex64>, spin: Vec<Complex64>) -> Result<Self> {
        let points = spin.len();
        if points < 2 || p_n.len() != points || p_nprime.len() != points {
            return Err(Error::InvalidParameter("state components must share a grid of >= 2 points".into()));
        }
        let mut data = p_n;
        data.extend(p_nprime);
        data.extend(spin);
        Ok(AtomicState { data, points })
    }

    pub fn cells(&self) -> usize {
        self.points - 1
    }

    pub fn zeta(&self) -> Vec<f64> {
        let dz = 1.0 / self.cells() as f64;
        (0..self.points).map(|i| i as f64 * dz).collect()
    }

    pub fn p_n(&self) -> &[Complex64] {
        &self.data[..self.points]
    }

    pub fn p_nprime(&self) -> &[Complex64] {
        &self.data[self.points..2 * self.points]
    }

    pub fn spin(&self) -> &[Complex64] {
        &self.data[2 * self.points..]
    }

    /// `zeta -> 1 - zeta` for every component.
    pub fn mirrored(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for chunk in self.data.chunks(self.points) {
            data.extend(chunk.iter().rev());
        }
        AtomicState {
            data,
            points: self.points,
        }
    }

    fn trapezoid(&self, f: impl Fn(usize) -> f64) -> f64 {
        let n = self.points;
        let dz = 1.0 / (n - 1) as f64;
        let inner: f64 = (1..n - 1).map(&f).sum();
        dz * (inner + 0.5 * (f(0) + f(n - 1)))
    }

    /// `2 pi b0 int |S|^2 dzeta`, in units of the pulse energy.
    pub fn spin_energy(&self, depth: f64) -> f64 {
        let s = self.spin();
        2.0 * std::f64::consts::PI * depth * self.trapezoid(|i| s[i].norm_sqr())
    }

    /// `2 pi b0 int (|P_n|^2 + |P_n'|^2) dzeta`.
    pub fn optical_energy(&self, depth: f64) -> f64 {
        let (a, b) = (self.p_n(), self.p_nprime());
        2.0 * std::f64::consts::PI * depth * self.trapezoid(|i| a[i].norm_sqr() + b[i].norm_sqr())
    }

    fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

/// Grid and error-control settings of the time stepper.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverSettings {
    /// Number of cells along `zeta`.
    pub cells: usize,
    pub time_step: f64,
    /// Largest accepted step-doubling error estimate: rms error over the
    /// grid divided by `1 + rms(state)`, with the probe amplitude of order one.
    pub tolerance: f64,
    /// Steps between error estimates.
    pub check_interval: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            cells: 200,
            time_step: 0.002,
            tolerance: 1e-5,
            check_interval: 100,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        if self.cells < 2 {
            return Err(Error::InvalidParameter("solver needs at least two cells".into()));
        }
        if !(self.time_step.is_finite() && self.time_step > 0.0) {
            return Err(Error::InvalidParameter(format!("time_step must be > 0, got {}", self.time_step)));
        }
        if !(self.tolerance > 0.0) || self.check_interval == 0 {
            return Err(Error::InvalidParameter("tolerance and check_interval must be positive".into()));
        }
        Ok(())
    }

    pub fn refined(&self) -> Self {
        SolverSettings {
            cells: 2 * self.cells,
            time_step: 0.5 * self.time_step,
            check_interval: 2 * self.check_interval,
            ..*self
        }
    }
}

/// Time-dependent drives of one integration stage.
pub struct Drive<'a> {
    /// Probe at the entrance face.
    pub input: &'a (dyn Fn(f64) -> Complex64 + Sync),
    /// Control strength relative to full, in `[0, 1]`.
    pub control: &'a (dyn Fn(f64) -> f64 + Sync),
    /// Times at which either drive may jump or kink.
    pub breakpoints: Vec<f64>,
}

/// Exit-face field and bookkeeping of one integration stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    /// Step times, including both ends.
    pub times: Vec<f64>,
    /// Exit field at each step time (right limit at a jump).
    pub exit: Vec<Complex64>,
    /// Entrance field at each step time (right limit).
    pub entrance: Vec<Complex64>,
    /// `int |a(1, t)|^2 dt` with one-sided limits at drive jumps.
    pub exit_energy: f64,
    /// `int |a(0, t)|^2 dt`, same quadrature.
    pub entrance_energy: f64,
    /// `2 pi b0 int int (sum |P_j|^2 + 2 Gamma |S|^2) dzeta dt`.
    pub dissipated: f64,
    /// States recorded every `snapshot_every` steps.
    pub snapshots: Vec<(f64, AtomicState)>,
    pub final_state: AtomicState,
    pub max_error_estimate: f64,
}

struct Stepper<'c> {
    coeffs: &'c BlochCoefficients,
    points: usize,
    dz: f64,
    k: [Vec<Complex64>; 4],
    tmp: Vec<Complex64>,
    field: Vec<Complex64>,
}

impl<'c> Stepper<'c> {
    fn new(coeffs: &'c BlochCoefficients, cells: usize) -> Self {
        let points = cells + 1;
        let zero = vec![Complex64::from(0.0); 3 * points];
        Stepper {
            coeffs,
            points,
            dz: 1.0 / cells as f64,
            k: [zero.clone(), zero.clone(), zero.clone(), zero.clone()],
            tmp: zero,
            field: vec![Complex64::from(0.0); points],
        }
    }

    /// Field along `zeta` for the given coherences and entrance value.
    fn fill_field(field: &mut [Complex64], coeffs: &BlochCoefficients, y: &[Complex64], points: usize, dz: f64, a_in: Complex64) {
        let gain = I * coeffs.field_gain();
        let [c_n, c_np] = coeffs.probe;
        let src = |i: usize| gain * (c_n * y[i] + c_np * y[points + i]);
        field[0] = a_in;
        let mut prev = src(0);
        for i in 1..points {
            let cur = src(i);
            field[i] = field[i - 1] + 0.5 * dz * (prev + cur);
            prev = cur;
        }
    }

    fn exit_field(&mut self, y: &[Complex64], a_in: Complex64) -> Complex64 {
        Self::fill_field(&mut self.field, self.coeffs, y, self.points, self.dz, a_in);
        self.field[self.points - 1]
    }

    fn rhs(coeffs: &BlochCoefficients, field: &mut [Complex64], points: usize, dz: f64, y: &[Complex64], a_in: Complex64, u: f64, out: &mut [Complex64]) {
        Self::fill_field(field, coeffs, y, points, dz, a_in);
        let [c_n, c_np] = coeffs.probe;
        let [v_n, v_np] = [u * coeffs.control[0], u * coeffs.control[1]];
        let rot_n = Complex64::new(-0.5, coeffs.detuning[0]);
        let rot_np = Complex64::new(-0.5, coeffs.detuning[1]);
        let rot_s = Complex64::new(-coeffs.spin_decay, coeffs.two_photon);
        let (pn, rest) = y.split_at(points);
        let (pnp, s) = rest.split_at(points);
        let (dpn, rest) = out.split_at_mut(points);
        let (dpnp, ds) = rest.split_at_mut(points);
        for i in 0..points {
            let a = field[i];
            dpn[i] = rot_n * pn[i] + I * (c_n * a + v_n * s[i]);
            dpnp[i] = rot_np * pnp[i] + I * (c_np * a + v_np * s[i]);
            ds[i] = rot_s * s[i] + I * (v_n * pn[i] + v_np * pnp[i]);
        }
    }

    /// One classical RK4 step over `[t, t + dt]`. Drives are sampled at
    /// interior limits so that jumps on step boundaries are resolved exactly.
    fn step(&mut self, y: &mut [Complex64], t: f64, dt: f64, drive: &Drive) {
        let eps = 1e-9 * dt;
        let stages = [t + eps, t + 0.5 * dt, t + 0.5 * dt, t + dt - eps];
        let weights = [0.0, 0.5 * dt, 0.5 * dt, dt];
        let (points, dz, coeffs) = (self.points, self.dz, self.coeffs);
        for stage in 0..4 {
            if stage == 0 {
                self.tmp.copy_from_slice(y);
            } else {
                let prev = &self.k[stage - 1];
                for ((t, y0), k) in self.tmp.iter_mut().zip(y.iter()).zip(prev) {
                    *t = y0 + weights[stage] * k;
                }
            }
            let ts = stages[stage];
            let (a_in, u) = ((drive.input)(ts), (drive.control)(ts));
            let mut out = std::mem::take(&mut self.k[stage]);
            Self::rhs(coeffs, &mut self.field, points, dz, &self.tmp, a_in, u, &mut out);
            self.k[stage] = out;
        }
        let [k1, k2, k3, k4] = &self.k;
        for i in 0..y.len() {
            y[i] += dt / 6.0 * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
        }
    }

    /// `sum |P_j|^2 + 2 Gamma |S|^2`, integrated along `zeta`.
    fn dissipation_density(&self, y: &[Complex64]) -> f64 {
        let n = self.points;
        let g = 2.0 * self.coeffs.spin_decay;
        let f = |i: usize| y[i].norm_sqr() + y[n + i].norm_sqr() + g * y[2 * n + i].norm_sqr();
        let inner: f64 = (1..n - 1).map(f).sum();
        self.dz * (inner + 0.5 * (f(0) + f(n - 1)))
    }
}

fn rms(values: impl ExactSizeIterator<Item = Complex64>) -> f64 {
    let n = values.len().max(1) as f64;
    (values.map(|v| v.norm_sqr()).sum::<f64>() / n).sqrt()
}

/// Integrate from `t0` over `steps` fixed steps.
///
/// Every `check_interval` steps, where the next two steps contain no drive
/// breakpoint, the two steps are repeated as one double step; a Richardson
/// error estimate above `tolerance` aborts the run.
pub fn evolve(
    coeffs: &BlochCoefficients,
    settings: &SolverSettings,
    initial: &AtomicState,
    t0: f64,
    steps: usize,
    drive: &Drive,
    snapshot_every: Option<usize>,
) -> Result<Trajectory> {
    settings.validate()?;
    if initial.cells() != settings.cells {
        return Err(Error::InvalidParameter(format!(
            "state has {} cells, solver expects {}",
            initial.cells(),
            settings.cells
        )));
    }
    let dt = settings.time_step;
    let eps = 1e-9 * dt;
    let mut stepper = Stepper::new(coeffs, settings.cells);
    let mut y = initial.data.clone();
    let gain = coeffs.field_gain();

    let mut times = Vec::with_capacity(steps + 1);
    let mut exit = Vec::with_capacity(steps + 1);
    let mut entrance = Vec::with_capacity(steps + 1);
    let mut snapshots = Vec::new();
    let (mut exit_energy, mut entrance_energy, mut dissipated) = (0.0, 0.0, 0.0);
    let mut max_error: f64 = 0.0;
    let mut check = vec![Complex64::from(0.0); y.len()];
    let mut diss_prev = stepper.dissipation_density(&y);

    for k in 0..=steps {
        let t = t0 + k as f64 * dt;
        if let Some(every) = snapshot_every {
            if every > 0 && k % every == 0 {
                snapshots.push((
                    t,
                    AtomicState {
                        data: y.clone(),
                        points: initial.points,
                    },
                ));
            }
        }
        let a_in = (drive.input)(t + eps);
        times.push(t);
        entrance.push(a_in);
        exit.push(stepper.exit_field(&y, a_in));
        if k == steps {
            break;
        }

        let breakpoint_ahead = drive.breakpoints.iter().any(|&b| b > t + eps && b < t + 2.0 * dt - eps);
        let estimate = k % settings.check_interval == 0 && k + 2 <= steps && !breakpoint_ahead;
        if estimate {
            check.copy_from_slice(&y);
            stepper.step(&mut check, t, 2.0 * dt, drive);
        }

        let a_left = (drive.input)(t + dt - eps);
        let left_exit_prev = exit[k];
        stepper.step(&mut y, t, dt, drive);
        let a_right_exit = stepper.exit_field(&y, a_left);
        exit_energy += 0.5 * dt * (left_exit_prev.norm_sqr() + a_right_exit.norm_sqr());
        entrance_energy += 0.5 * dt * (a_in.norm_sqr() + a_left.norm_sqr());

        let diss = stepper.dissipation_density(&y);
        dissipated += gain * 0.5 * dt * (diss_prev + diss);
        diss_prev = diss;

        if estimate {
            let mut fine = y.clone();
            stepper.step(&mut fine, t + dt, dt, drive);
            let diff = rms(fine.iter().zip(&check).map(|(a, b)| a - b)) / 15.0;
            let err = diff / (1.0 + rms(fine.iter().copied()));
            if !err.is_finite() {
                return Err(Error::NonFinite { time: t });
            }
            max_error = max_error.max(err);
            if err > settings.tolerance {
                return Err(Error::StepRejected {
                    error: err,
                    tolerance: settings.tolerance,
                    time: t,
                });
            }
        }
        if !a_right_exit.re.is_finite() || !a_right_exit.im.is_finite() {
            return Err(Error::NonFinite { time: t + dt });
        }
    }

    let final_state = AtomicState {
        data: y,
        points: initial.points,
    };
    if !final_state.is_finite() {
        return Err(Error::NonFinite {
            time: t0 + steps as f64 * dt,
        });
    }
    Ok(Trajectory {
        times,
        exit,
        entrance,
        exit_energy,
        entrance_energy,
        dissipated,
        snapshots,
        final_state,
        max_error_estimate: max_error,
    })
}
