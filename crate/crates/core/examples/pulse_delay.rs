//! A rectangular pulse through an optically thick slab on three neighbouring
//! carrier modes near the Raman peak: delay against loss.
//!
//!     cargo run --release --example pulse_delay -- [offset] [depth]

use raman_memory::atomic::{build_couplings, AtomModel};
use raman_memory::dressed::{find_resonance_near, ControlField, DressedMedium, MomentumDistribution, SpectrumModel};
use raman_memory::transport::{propagate_pulse, pulse_metrics, MediumSpec, PulseSpec, Sampling};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<f64> = std::env::args().skip(1).map(|a| a.parse()).collect::<Result<_, _>>()?;
    let offset = args.first().copied().unwrap_or(0.3);
    let depth = args.get(1).copied().unwrap_or(50.0);

    let atom = AtomModel::cesium_d1();
    let control = ControlField::new(50.0, 15.0, build_couplings(&atom)?)?;
    let medium = DressedMedium::new(atom, control, MomentumDistribution::Frozen, SpectrumModel::Full)?;
    let peak = find_resonance_near(&medium, 50.0, 5.0, 0.002)?.center;

    let duration = 10.0;
    // Place the lowest of the three modes `offset` above the peak.
    let spacing = PulseSpec::rectangular(duration, 0.0, 0).mode_spacing();
    let central = peak + offset + spacing;
    let slab = MediumSpec::new(depth);
    let sampling = Sampling {
        record_periods: 32,
        ..Sampling::default()
    };
    println!("Raman peak {peak:.4}, central carrier {central:.4}, depth {depth}");
    for q in [-1, 0, 1] {
        let pulse = PulseSpec::rectangular(duration, central, q);
        let rec = propagate_pulse(&pulse, &slab, &medium, &sampling)?;
        let m = pulse_metrics(&rec, &pulse);
        println!(
            "mode {q:+}: carrier {:.4}  delay {:7.3}  transmission {:.4}  tail {:.4}",
            pulse.carrier(),
            m.delay,
            m.transmission,
            m.tail_fraction
        );
        for w in &rec.warnings {
            println!("  warning: {w}");
        }
    }
    Ok(())
}
