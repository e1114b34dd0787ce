//! Store a rectangular pulse in the spin coherence and read it out forward
//! and backward.
//!
//! The pulse travels on the lower side mode, `w_bar - 2 pi / T`, tuned a
//! given offset to the blue of the Raman (Autler-Townes) absorption peak.
//!
//!     cargo run --release --example quantum_memory -- [offset] [cells] [dt]

use std::time::Instant;

use raman_memory::atomic::{build_couplings, AtomModel};
use raman_memory::dressed::{find_resonance_near, ControlField, DressedMedium, MomentumDistribution, SpectrumModel};
use raman_memory::memory::{run_both_directions, ProtocolConfig, SolverSettings};
use raman_memory::transport::{MediumSpec, PulseSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<f64> = std::env::args().skip(1).map(|a| a.parse()).collect::<Result<_, _>>()?;
    let offset = args.first().copied().unwrap_or(0.0);
    let mut solver = SolverSettings::default();
    if let Some(&cells) = args.get(1) {
        solver.cells = cells as usize;
    }
    if let Some(&dt) = args.get(2) {
        solver.time_step = dt;
    }

    let atom = AtomModel::cesium_d1();
    let control = ControlField::new(50.0, 15.0, build_couplings(&atom)?)?;
    let medium = DressedMedium::new(atom, control, MomentumDistribution::Frozen, SpectrumModel::Full)?;
    let peak = find_resonance_near(&medium, 50.0, 5.0, 0.002)?;

    let duration = 10.0;
    let lower = PulseSpec::rectangular(duration, 0.0, -1);
    let carrier = peak.center + offset + lower.mode_spacing();
    let pulse = PulseSpec::rectangular(duration, carrier, -1);

    let mut config = ProtocolConfig::new(atom, control, pulse, MediumSpec::new(50.0));
    config.solver = solver;

    let start = Instant::now();
    let (fw, bw) = run_both_directions(&config)?;
    println!("Raman peak at {:.4}, lower-mode carrier {:.4}", peak.center, config.pulse.carrier());
    println!("leakage            {:.4}", fw.leakage);
    println!("stored fraction    {:.4}", fw.stored_fraction);
    println!("forward efficiency {:.4}", fw.efficiency);
    println!("backward efficiency {:.4}", bw.efficiency);
    println!("spin-wave centroid {:.4}", fw.spin_wave.centroid());
    println!(
        "write balance {:.2e}, read balance fw {:.2e} bw {:.2e}",
        fw.budget.write_imbalance(),
        fw.budget.read_imbalance(),
        bw.budget.read_imbalance()
    );
    println!("max step error estimate {:.2e}", fw.max_error_estimate.max(bw.max_error_estimate));
    println!("elapsed {:.2?}", start.elapsed());
    Ok(())
}
