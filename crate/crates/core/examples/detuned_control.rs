//! The Raman-type resonance near the control frequency for a control tuned
//! below and above the line. The upper hyperfine level suppresses the peak
//! on one side and enhances it on the other.
//!
//!     cargo run --example detuned_control -- [rabi]

use raman_memory::atomic::{build_couplings, AtomModel};
use raman_memory::dressed::{find_resonance_near, ControlField, DressedMedium, MomentumDistribution, SpectrumModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rabi: f64 = std::env::args().nth(1).map(|a| a.parse()).transpose()?.unwrap_or(15.0);
    let atom = AtomModel::cesium_d1();
    println!("{:>8} {:>10} {:>10} {:>10} {:>10} {:>8}", "delta", "full at", "height", "lambda at", "height", "ratio");
    for delta in [-100.0, -50.0, -20.0, 20.0, 50.0, 100.0] {
        let control = ControlField::new(delta, rabi, build_couplings(&atom)?)?;
        let peak = |model| -> Result<_, Box<dyn std::error::Error>> {
            let m = DressedMedium::new(atom, control, MomentumDistribution::Frozen, model)?;
            Ok(find_resonance_near(&m, delta, 10.0, 0.0005)?)
        };
        let (f, l) = (peak(SpectrumModel::Full)?, peak(SpectrumModel::Lambda)?);
        println!(
            "{delta:>8.1} {:>10.4} {:>10.6} {:>10.4} {:>10.6} {:>8.4}",
            f.center,
            f.height,
            l.center,
            l.height,
            f.height / l.height
        );
    }
    Ok(())
}
