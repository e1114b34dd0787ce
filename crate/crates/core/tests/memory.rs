mod common;

use common::*;
use num_complex::Complex64;
use raman_memory::dressed::{uniform_grid, SpectrumModel};
use raman_memory::memory::{
    evolve, retrieve, run_both_directions, run_protocol, store, AtomicState, BlochCoefficients, Drive, ReadDirection,
    SolverSettings,
};
use raman_memory::transport::{propagate_pulse, MediumSpec, PulseShape, Sampling};

#[test]
fn stationary_response_is_the_susceptibility() {
    let (medium, peak) = raman_setup();
    for carrier in [peak, peak + 0.3, 0.0, 120.0] {
        let c = BlochCoefficients::new(&medium.atom, &medium.control, carrier, 50.0, 0.0).unwrap();
        for w in uniform_grid(-40.0, 40.0, 50) {
            let got = c.stationary_response(w).unwrap();
            let want = medium.susceptibility(carrier + w).unwrap();
            assert!((got - want).norm() <= 1e-6 * want.norm(), "{carrier} {w}: {got} vs {want}");
        }
    }
}

#[test]
fn time_domain_matches_transfer_function_at_low_depth() {
    let (medium, peak) = raman_setup();
    let pulse = td_fd_pulse(peak, PulseShape::SineSquared);
    let r = time_vs_frequency(&medium, &pulse, 5.0, 200, 64, 200, 10, 0.0);
    assert!(r.relative_l2 < 1e-4, "{:e}", r.relative_l2);
    assert!(r.error_estimate < 1e-4);
}

#[test]
fn dark_spin_wave_is_conserved() {
    let (medium, peak) = raman_setup();
    let coeffs = BlochCoefficients::new(&medium.atom, &medium.control, peak, 50.0, 0.0).unwrap();
    let cells = 100;
    let zeta = AtomicState::zeros(cells).zeta();
    let cells = zeta.len() - 1;
    let spin: Vec<Complex64> = zeta.iter().map(|z| Complex64::from_polar((-3.0 * z).exp(), 2.0 * z)).collect();
    let zero = vec![Complex64::from(0.0); cells + 1];
    let initial = AtomicState::from_parts(zero.clone(), zero, spin).unwrap();
    let off = |_: f64| 0.0;
    let none = |_: f64| Complex64::from(0.0);
    let drive = Drive {
        input: &none,
        control: &off,
        breakpoints: vec![],
    };
    let settings = SolverSettings {
        cells,
        ..SolverSettings::default()
    };
    let steps = (100.0 / settings.time_step) as usize;
    let tr = evolve(&coeffs, &settings, &initial, 0.0, steps, &drive, None).unwrap();
    let (e0, e1) = (initial.spin_energy(50.0), tr.final_state.spin_energy(50.0));
    assert!(((e1 - e0) / e0).abs() < 1e-8, "{e0} {e1}");
    assert_eq!(tr.exit_energy, 0.0);
    assert!(tr.final_state.p_n().iter().all(|p| p.norm() == 0.0));
    // Only the two-photon phase accumulates.
    let phase = Complex64::from_polar(1.0, coeffs.two_photon * 100.0);
    for (a, b) in tr.final_state.spin().iter().zip(initial.spin()) {
        assert!((a - b * phase).norm() < 1e-8);
    }
}

#[test]
fn backward_read_is_forward_read_of_the_mirrored_wave() {
    let c = memory_protocol(0.0, -1, &[]);
    let stored = store(&c).unwrap();
    let mut mirrored = stored.clone();
    mirrored.state = stored.state.mirrored();
    let bw = retrieve(&c, &stored, ReadDirection::Backward).unwrap();
    let fw_of_mirror = retrieve(&c, &mirrored, ReadDirection::Forward).unwrap();
    assert_eq!(bw.efficiency, fw_of_mirror.efficiency);
    assert_eq!(stored.state.mirrored().mirrored(), stored.state);
    let z = stored.state.zeta();
    let zm = stored.state.mirrored().spin().to_vec();
    let n = z.len();
    assert!((z[0] + z[n - 1] - 1.0).abs() < 1e-14);
    assert_eq!(zm[0], stored.state.spin()[n - 1]);
}

#[test]
fn stored_light_figures() {
    let c = memory_protocol(0.0, -1, &[]);
    let (fw, bw) = run_both_directions(&c).unwrap();
    // Spin wave concentrated near the entrance face.
    assert!(bw.spin_wave.centroid() < 0.2, "{}", bw.spin_wave.centroid());
    assert!(bw.efficiency > 0.6, "{}", bw.efficiency);
    assert!(bw.efficiency >= fw.efficiency);
    for r in [&fw, &bw] {
        assert!(r.leakage + r.efficiency <= 1.0 + 1e-6);
        assert!(r.stored_fraction + r.leakage <= 1.0 + 1e-6);
        assert!(r.max_error_estimate <= c.solver.tolerance);
    }
    assert_eq!(fw.leakage, bw.leakage);
}

#[test]
fn refinement_converges_and_closes_the_budget() {
    let coarse = memory_protocol(0.0, -1, &[]);
    let mut fine = coarse.clone();
    fine.solver = coarse.solver.refined();
    let a = run_protocol(&coarse).unwrap();
    let b = run_protocol(&fine).unwrap();
    let rel = (a.efficiency - b.efficiency).abs() / b.efficiency;
    assert!(rel < 5e-3, "{rel:e}");
    assert!(((a.leakage - b.leakage) / b.leakage).abs() < 5e-3);
    // Bookkeeping against the decay-channel integral.
    let (wa, wb) = (a.budget.write_imbalance().abs(), b.budget.write_imbalance().abs());
    let (ra, rb) = (a.budget.read_imbalance().abs(), b.budget.read_imbalance().abs());
    assert!(wb < 2e-3 && rb < 1e-2, "{wb:e} {rb:e}");
    // The quadrature mismatch is second order in the grid.
    for (x, y) in [(wa, wb), (ra, rb)] {
        assert!((3.0..5.0).contains(&(x / y)), "{x:e} -> {y:e}");
    }
    let total = b.leakage + b.budget.write_dissipated + b.budget.read_dissipated + b.efficiency + b.budget.remaining;
    assert!((total - 1.0).abs() < 1e-2, "{total}");
}

#[test]
fn carrier_modes_trade_leakage_for_storage() {
    let reports: Vec<_> = [-1, 0, 1]
        .iter()
        .map(|&q| run_protocol(&memory_protocol(0.0, q, &[])).unwrap())
        .collect();
    // The mode nearest the Raman line leaks least and is stored best.
    assert!(reports[0].leakage < reports[1].leakage && reports[1].leakage < reports[2].leakage);
    assert!(reports[0].stored_fraction > reports[1].stored_fraction);
    assert!(reports[1].stored_fraction > reports[2].stored_fraction);
}

#[test]
fn without_control_leakage_is_bare_transmission() {
    let (_, peak) = raman_setup();
    let c = memory_protocol(
        0.0,
        -1,
        &[
            "control.rabi=0.0".to_string(),
            format!("pulse.carrier={{ reference = \"absolute\", value = {peak:?} }}"),
        ],
    );
    let r = run_protocol(&c).unwrap();
    assert!(r.spin_wave.sigma.iter().all(|s| s.norm() == 0.0));
    let bare = frozen(cesium(), 50.0, 0.0, SpectrumModel::Bare);
    let rec = propagate_pulse(&c.pulse, &MediumSpec::new(50.0), &bare, &Sampling::default()).unwrap();
    let transmission = rec.output_energy / rec.input_energy;
    assert!((r.leakage - transmission).abs() < 1e-3 * transmission, "{} vs {transmission}", r.leakage);
}

#[test]
fn empty_medium_transmits_everything() {
    let c = memory_protocol(0.0, -1, &["medium.depth=0.0".to_string()]);
    let r = run_protocol(&c).unwrap();
    assert!((r.leakage - 1.0).abs() < 1e-12);
    assert_eq!(r.efficiency, 0.0);
}
