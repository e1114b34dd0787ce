mod common;

use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use raman_memory::dressed::{
    greens_matrix, quasi_energies, scan_spectrum, uniform_grid, DressedMedium, ExcitedState, MomentumDistribution,
    MomentumSample, SpectrumModel,
};

fn block_error(lib: [[Complex64; 2]; 2], oracle: [[Complex64; 2]; 2]) -> f64 {
    let scale = oracle.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
    lib.iter()
        .flatten()
        .zip(oracle.iter().flatten())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
        / scale
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn greens_match_resolvent_inversion(
        energy in -80.0f64..320.0,
        detuning in -80.0f64..300.0,
        rabi in 0.5f64..40.0,
        doppler in -20.0f64..20.0,
        recoil in 0.0f64..1.0,
    ) {
        let atom = cesium();
        let c = control(&atom, detuning, rabi);
        let p = MomentumSample { doppler, recoil };
        let g = greens_matrix(&atom, &c, Complex64::from(energy), &p).unwrap();
        let lib = [[g.nn, g.n_np], [g.np_n, g.np_np]];
        let err = block_error(lib, resolvent_block(&atom, &c, energy, &p));
        prop_assert!(err < 1e-10, "relative error {:e}", err);
    }

    #[test]
    fn quasi_energies_are_block_eigenvalues(
        detuning in -80.0f64..300.0,
        rabi in 0.0f64..40.0,
        doppler in -20.0f64..20.0,
        recoil in 0.0f64..1.0,
    ) {
        let atom = cesium();
        let c = control(&atom, detuning, rabi);
        let p = MomentumSample { doppler, recoil };
        let shift = p.excited_kinetic_shift();
        for (state, e, v) in [
            (ExcitedState::N, atom.energy_n(), c.coupling_n()),
            (ExcitedState::NPrime, atom.energy_n_prime(), c.coupling_nprime()),
        ] {
            let photon = Complex64::from(shift + detuning - p.control_doppler());
            let excited = Complex64::new(shift + e, -0.5);
            let mut want = eigen_2x2(photon, excited, v);
            let mut got = quasi_energies(&atom, &c, state, &p);
            let key = |z: &Complex64| (z.re, z.im);
            want.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
            got.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
            for (a, b) in got.iter().zip(&want) {
                prop_assert!((a - b).norm() < 1e-10 * (1.0 + b.norm()), "{} vs {}", a, b);
            }
        }
    }
}

#[test]
fn greens_without_control_are_bare_lorentzians() {
    let atom = cesium();
    let c = control(&atom, 10.0, 0.0);
    for e in [-30.0, 0.0, 0.3, 128.0, 256.0] {
        let g = greens_matrix(&atom, &c, Complex64::from(e), &MomentumSample::REST).unwrap();
        assert_eq!(g.nn, 1.0 / Complex64::new(e - atom.energy_n(), 0.5));
        assert_eq!(g.n_np, Complex64::from(0.0));
        let o = resolvent_block(&atom, &c, e, &MomentumSample::REST);
        assert!(block_error([[g.nn, g.n_np], [g.np_n, g.np_np]], o) < 1e-14);
    }
}

#[test]
fn lambda_model_is_the_three_level_formula() {
    for (delta, rabi) in [(0.0, 15.0), (-50.0, 15.0), (50.0, 15.0), (20.0, 5.0)] {
        let m = frozen(cesium(), delta, rabi, SpectrumModel::Lambda);
        let f_n = m.probe_factors()[0];
        for x in uniform_grid(delta - 40.0, delta + 40.0, 801) {
            let want = lambda_chi(x, delta, rabi, f_n);
            let got = m.susceptibility(x).unwrap();
            assert!((got - want).norm() <= 1e-10 * want.norm().max(1e-6), "{delta} {rabi} {x}");
        }
    }
}

#[test]
fn full_model_reduces_to_three_levels_far_from_n_prime() {
    let e6 = lambda_limit_error(1e6);
    assert!(e6 < 1e-4, "{e6:e}");
    let e5 = lambda_limit_error(1e5);
    let e7 = lambda_limit_error(1e7);
    // Leading correction falls as the inverse splitting.
    assert!((e5 / e6 - 10.0).abs() < 1.0, "{e5:e} {e6:e}");
    assert!((e6 / e7 - 10.0).abs() < 1.0, "{e6:e} {e7:e}");
}

#[test]
fn susceptibility_matches_resolvent_on_preset_grid() {
    for model in [SpectrumModel::Full, SpectrumModel::Lambda, SpectrumModel::Bare] {
        let m = frozen(cesium(), 0.0, 15.0, model);
        for x in uniform_grid(-40.0, 300.0, 3401) {
            let (got, want) = (m.susceptibility(x).unwrap(), chi_oracle(&m, x));
            assert!((got - want).norm() <= 1e-10 * want.norm(), "{model:?} {x}");
        }
    }
}

#[test]
fn derivative_matches_central_difference() {
    let m = frozen(cesium(), 50.0, 15.0, SpectrumModel::Full);
    let h = 1e-4;
    let chi = |x: f64| m.susceptibility(x).unwrap();
    for x in uniform_grid(30.0, 70.0, 161) {
        let fd = (8.0 * (chi(x + h) - chi(x - h)) - (chi(x + 2.0 * h) - chi(x - 2.0 * h))) / (12.0 * h);
        let d = m.susceptibility_derivative(x).unwrap();
        assert!((d - fd).norm() <= 1e-6 * d.norm().max(1e-3), "{x}: {d} vs {fd}");
    }
}

#[test]
fn kramers_kronig_holds() {
    for (delta, rabi) in [(0.0, 15.0), (50.0, 15.0), (-50.0, 15.0)] {
        let m = frozen(cesium(), delta, rabi, SpectrumModel::Full);
        let e = kk_relative_error(&m);
        assert!(e < 0.01, "{delta} {rabi}: {e:e}");
    }
}

#[test]
fn absorption_is_non_negative() {
    let atom = cesium();
    let thermal = MomentumDistribution::Thermal {
        doppler_width: 5.0,
        recoil: 0.2,
        quadrature_order: 32,
    };
    for dist in [MomentumDistribution::Frozen, thermal] {
        for (delta, rabi) in [(0.0, 15.0), (-50.0, 15.0), (50.0, 15.0), (120.0, 40.0)] {
            for model in [SpectrumModel::Full, SpectrumModel::Lambda, SpectrumModel::Bare] {
                let m = DressedMedium::new(atom, control(&atom, delta, rabi), dist, model).unwrap();
                let s = scan_spectrum(&m, &uniform_grid(-60.0, 320.0, 38001)).unwrap();
                // Exact dark points return a rounding-sized value of either sign.
                let scale = s.values.iter().map(|z| z.norm()).fold(0.0, f64::max);
                assert!(s.min_absorption() >= -1e-15 * scale, "{delta} {rabi} {model:?} {dist:?}");
            }
        }
    }
}

#[test]
fn cold_thermal_average_is_the_frozen_result() {
    let atom = cesium();
    let c = control(&atom, 0.0, 15.0);
    let cold = MomentumDistribution::Thermal {
        doppler_width: 1e-9,
        recoil: 0.0,
        quadrature_order: 16,
    };
    let a = DressedMedium::new(atom, c, cold, SpectrumModel::Full).unwrap();
    let b = DressedMedium::new(atom, c, MomentumDistribution::Frozen, SpectrumModel::Full).unwrap();
    for x in uniform_grid(-40.0, 300.0, 1701) {
        let (u, v) = (a.susceptibility(x).unwrap(), b.susceptibility(x).unwrap());
        assert!((u - v).norm() <= 1e-8 * v.norm(), "{x}");
    }
}

#[test]
fn thermal_average_matches_direct_quadrature() {
    let atom = cesium();
    let c = control(&atom, 0.0, 15.0);
    let (width, recoil) = (0.3, 0.05);
    let m = DressedMedium::new(
        atom,
        c,
        MomentumDistribution::Thermal {
            doppler_width: width,
            recoil,
            quadrature_order: 48,
        },
        SpectrumModel::Full,
    )
    .unwrap();
    let f = m.probe_factors();
    let nodes = uniform_grid(-10.0 * width, 10.0 * width, 4001);
    let h = nodes[1] - nodes[0];
    for x in [-20.0, -8.0, -3.0, 0.5, 4.0, 9.0, 120.0, 262.0] {
        let mut acc = Complex64::from(0.0);
        for &d in &nodes {
            let w = (-0.5 * (d / width).powi(2)).exp() / (width * (2.0 * std::f64::consts::PI).sqrt()) * h;
            let g = resolvent_block(&atom, &c, x, &MomentumSample { doppler: d, recoil });
            let mut s = Complex64::from(0.0);
            for a in 0..2 {
                for b in 0..2 {
                    s += f[a] * g[a][b] * f[b];
                }
            }
            acc += -0.75 * w * s;
        }
        let got = m.susceptibility(x).unwrap();
        assert!((got - acc).norm() <= 1e-6 * acc.norm(), "{x}: {got} vs {acc}");
    }
}
