//! Independent oracles shared by the integration tests and the acceptance
//! report. Nothing here calls the closed-form propagators.
#![allow(dead_code)]

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use raman_memory::atomic::{build_couplings, AtomModel, HalfInt};
use raman_memory::experiment::LoadedConfig;
use raman_memory::memory::ProtocolConfig;
use raman_memory::dressed::{
    find_resonance_near, ControlField, DressedMedium, MomentumDistribution, MomentumSample, SpectrumModel,
};
use raman_memory::memory::{evolve, AtomicState, BlochCoefficients, Drive, SolverSettings};
use raman_memory::transport::{propagate_pulse, MediumSpec, PulseShape, PulseSpec, Sampling};

pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn cesium() -> AtomModel {
    AtomModel::cesium_d1()
}

pub fn atom_with_splitting(splitting: f64) -> AtomModel {
    AtomModel::new(HalfInt::from_doubled(7), splitting).unwrap()
}

pub fn control(atom: &AtomModel, detuning: f64, rabi: f64) -> ControlField {
    ControlField::new(detuning, rabi, build_couplings(atom).unwrap()).unwrap()
}

pub fn frozen(atom: AtomModel, detuning: f64, rabi: f64, model: SpectrumModel) -> DressedMedium {
    let c = control(&atom, detuning, rabi);
    DressedMedium::new(atom, c, MomentumDistribution::Frozen, model).unwrap()
}

/// `(E - H)^-1` restricted to `{n, n'}`, with `H` the non-Hermitian
/// single-excitation Hamiltonian on `{n, n', m' + control photon}`.
pub fn resolvent_block(atom: &AtomModel, control: &ControlField, energy: f64, p: &MomentumSample) -> [[Complex64; 2]; 2] {
    let shift = p.excited_kinetic_shift();
    let half = Complex64::new(0.0, 0.5);
    let v_n = Complex64::from(control.coupling_n());
    let v_np = Complex64::from(control.coupling_nprime());
    let h = Matrix3::new(
        shift + atom.energy_n() - half,
        Complex64::from(0.0),
        v_n,
        Complex64::from(0.0),
        shift + atom.energy_n_prime() - half,
        v_np,
        v_n,
        v_np,
        Complex64::from(shift + control.detuning - p.control_doppler()),
    );
    let mut m = Matrix3::from_diagonal(&Vector3::repeat(Complex64::from(energy))) - h;
    if control.rabi == 0.0 {
        // The photon level decouples and may sit exactly at `energy`.
        m[(2, 2)] = Complex64::from(1.0);
    }
    let g = m.try_inverse().expect("resolvent is regular off the real poles");
    [[g[(0, 0)], g[(0, 1)]], [g[(1, 0)], g[(1, 1)]]]
}

/// Susceptibility from the resolvent block at rest.
pub fn chi_oracle(medium: &DressedMedium, detuning_bar: f64) -> Complex64 {
    let c = medium.effective_control();
    let g = resolvent_block(&medium.atom, &c, detuning_bar, &MomentumSample::REST);
    let f = medium.probe_factors();
    let mut s = Complex64::from(0.0);
    for a in 0..2 {
        for b in 0..2 {
            s += f[a] * g[a][b] * f[b];
        }
    }
    -0.75 * s
}

/// Three-level susceptibility, `n'` absent.
pub fn lambda_chi(detuning_bar: f64, control_detuning: f64, rabi: f64, probe_to_n: f64) -> Complex64 {
    let v2 = 0.25 * rabi * rabi;
    if v2 > 0.0 && detuning_bar == control_detuning {
        return Complex64::from(0.0);
    }
    let den = Complex64::new(detuning_bar, 0.5) - v2 / (detuning_bar - control_detuning);
    -0.75 * probe_to_n * probe_to_n / den
}

/// Largest deviation of the full model from the three-level formula at
/// `Delta = 0`, `Rabi = 5`, relative to the formula's peak.
pub fn lambda_limit_error(splitting: f64) -> f64 {
    let m = frozen(atom_with_splitting(splitting), 0.0, 5.0, SpectrumModel::Full);
    let f_n = m.probe_factors()[0];
    let grid = raman_memory::dressed::uniform_grid(-20.0, 20.0, 4001);
    let peak = grid.iter().map(|&x| lambda_chi(x, 0.0, 5.0, f_n).norm()).fold(0.0, f64::max);
    grid.iter()
        .map(|&x| (m.susceptibility(x).unwrap() - lambda_chi(x, 0.0, 5.0, f_n)).norm())
        .fold(0.0, f64::max)
        / peak
}

/// Eigenvalues of the 2x2 block `{photon, j}` by the quadratic formula in a
/// form that does not cancel.
pub fn eigen_2x2(a: Complex64, b: Complex64, v: f64) -> [Complex64; 2] {
    let tr = a + b;
    let det = a * b - v * v;
    let disc = (tr * tr - 4.0 * det).sqrt();
    let big = if (tr + disc).norm() >= (tr - disc).norm() { 0.5 * (tr + disc) } else { 0.5 * (tr - disc) };
    [big, det / big]
}

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`.
pub fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// `(1/pi) P int y(t) / (t - x) dt` for `y` piecewise linear on `grid`,
/// integrated exactly cell by cell.
pub fn hilbert_piecewise_linear(grid: &[f64], y: &[f64], x: f64) -> f64 {
    let mut s = 0.0;
    for k in 0..grid.len() - 1 {
        let (t0, t1) = (grid[k], grid[k + 1]);
        let slope = (y[k + 1] - y[k]) / (t1 - t0);
        // y(t) = y(x) + slope (t - x) on this cell, so the integrand splits
        // into a constant and a log part.
        let yx = y[k] + slope * (x - t0);
        let (u0, u1) = (t0 - x, t1 - x);
        let log = if u0 == 0.0 || u1 == 0.0 {
            // Endpoint singularities cancel between neighbours in the
            // principal value; the companion cell supplies the other half.
            let (a, b) = (u0.abs().max(1e-300), u1.abs().max(1e-300));
            (b / a).ln()
        } else {
            (u1.abs() / u0.abs()).ln()
        };
        s += slope * (t1 - t0) + yx * log;
    }
    s / std::f64::consts::PI
}

/// Grid dense around the structure, sparse in the far wings.
pub fn kk_grid() -> Vec<f64> {
    let mut g = raman_memory::dressed::uniform_grid(-4000.0, -100.0, 3901);
    g.pop();
    let mut core = raman_memory::dressed::uniform_grid(-100.0, 400.0, 100_001);
    core.pop();
    g.extend(core);
    g.extend(raman_memory::dressed::uniform_grid(400.0, 4000.0, 3601));
    g
}

/// Relative L2 residual of the principal-value transform of `chi''` against
/// `chi'` over `[-100, 100]`.
pub fn kk_relative_error(medium: &DressedMedium) -> f64 {
    let grid = kk_grid();
    let chi: Vec<Complex64> = grid.iter().map(|&x| medium.susceptibility(x).unwrap()).collect();
    let im: Vec<f64> = chi.iter().map(|z| z.im).collect();
    let (mut num, mut den) = (0.0, 0.0);
    // Evaluate between nodes so no cell ends on the singular point.
    for x in raman_memory::dressed::uniform_grid(-100.0, 100.0, 2001).into_iter().map(|x| x + 0.0025) {
        let want = medium.susceptibility(x).unwrap().re;
        let got = hilbert_piecewise_linear(&grid, &im, x);
        num += (got - want).powi(2);
        den += want * want;
    }
    (num / den).sqrt()
}

/// Probe detuning of the absorption peak nearest `guess`.
pub fn peak_near(medium: &DressedMedium, guess: f64) -> f64 {
    find_resonance_near(medium, guess, 5.0, 0.002).unwrap().center
}

/// Pulse-delay geometry: control 50 gamma above the line at Rabi 15, peak
/// found on the red two-photon resonance.
pub fn raman_setup() -> (DressedMedium, f64) {
    let medium = frozen(cesium(), 50.0, 15.0, SpectrumModel::Full);
    let peak = peak_near(&medium, 50.0);
    (medium, peak)
}

pub struct TdFdReport {
    pub relative_l2: f64,
    pub error_estimate: f64,
}

/// Exit field of a pulse computed twice: through the exact slab transfer
/// function and by integrating the Maxwell-Bloch equations on the same
/// time samples with the control held on. The solver takes `substeps`
/// steps per sample.
///
/// `exclude` removes samples within that distance of the pulse edges from
/// the norm; a discontinuous envelope rings there in the spectral result.
pub fn time_vs_frequency(
    medium: &DressedMedium,
    pulse: &PulseSpec,
    depth: f64,
    window_modes: usize,
    record_periods: usize,
    cells: usize,
    substeps: usize,
    exclude: f64,
) -> TdFdReport {
    let sampling = Sampling {
        window_modes,
        record_periods,
        ..Sampling::default()
    };
    let rec = propagate_pulse(pulse, &MediumSpec::new(depth), medium, &sampling).unwrap();
    let dt = rec.time_step();
    let coeffs = BlochCoefficients::new(&medium.atom, &medium.control, pulse.carrier(), depth, 0.0).unwrap();
    let settings = SolverSettings {
        cells,
        time_step: dt / substeps as f64,
        tolerance: 1e-4,
        check_interval: 100,
    };
    let input = |t: f64| Complex64::from(pulse.envelope(t));
    let on = |_t: f64| 1.0;
    let drive = Drive {
        input: &input,
        control: &on,
        breakpoints: vec![0.0, pulse.duration],
    };
    let n = rec.times.len();
    let tr = evolve(&coeffs, &settings, &AtomicState::zeros(cells), rec.times[0], (n - 1) * substeps, &drive, None).unwrap();
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..n {
        let t = rec.times[i];
        if exclude > 0.0 && (t.abs() < exclude || (t - pulse.duration).abs() < exclude) {
            continue;
        }
        num += (tr.exit[i * substeps] - rec.output[i]).norm_sqr();
        den += rec.output[i].norm_sqr();
    }
    TdFdReport {
        relative_l2: (num / den).sqrt(),
        error_estimate: tr.max_error_estimate,
    }
}

/// Carrier one mode above the point 0.3 gamma blue of the Raman peak.
pub fn td_fd_pulse(peak: f64, shape: PulseShape) -> PulseSpec {
    let duration = 10.0;
    PulseSpec {
        duration,
        shape,
        carrier_offset: peak + 0.3 + 2.0 * std::f64::consts::PI / duration,
        mode_index: 0,
    }
}

/// The stored-light preset with the mode carrier `offset` from the Raman
/// peak, for carrier mode `mode` of that central carrier.
pub fn memory_protocol(offset: f64, mode: i32, overrides: &[String]) -> ProtocolConfig {
    let mut all = vec![format!("pulse.carrier.offset={offset:?}"), format!("memory.mode={mode}")];
    all.extend_from_slice(overrides);
    let loaded = LoadedConfig::load("fig6").unwrap().with_overrides(&all).unwrap();
    let (central, _) = loaded.config.resolve_carrier().unwrap();
    loaded.config.protocol(central).unwrap()
}
