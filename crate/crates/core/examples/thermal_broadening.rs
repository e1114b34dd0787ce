//! Doppler averaging of the dressed susceptibility with co-propagating
//! fields: the transparency minimum as the thermal width grows.
//!
//!     cargo run --release --example thermal_broadening -- [rabi]

use raman_memory::atomic::{build_couplings, AtomModel};
use raman_memory::dressed::{
    eit_diagnostics, scan_spectrum, uniform_grid, ControlField, DressedMedium, MomentumDistribution, SpectrumModel,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rabi: f64 = std::env::args().nth(1).map(|a| a.parse()).transpose()?.unwrap_or(15.0);
    let atom = AtomModel::cesium_d1();
    let control = ControlField::new(0.0, rabi, build_couplings(&atom)?)?;
    let grid = uniform_grid(-40.0, 40.0, 8001);
    println!("{:>8} {:>12} {:>12} {:>12}", "width", "location", "residual", "min chi''");
    for width in [0.0, 1.0, 10.0, 30.0, 100.0] {
        let dist = if width == 0.0 {
            MomentumDistribution::Frozen
        } else {
            MomentumDistribution::Thermal {
                doppler_width: width,
                recoil: 0.0,
                quadrature_order: 96,
            }
        };
        let medium = DressedMedium::new(atom, control, dist, SpectrumModel::Full)?;
        let spectrum = scan_spectrum(&medium, &grid)?;
        match eit_diagnostics(&spectrum) {
            Ok(e) => println!(
                "{width:>8.2} {:>12.5} {:>12.4e} {:>12.3e}",
                e.location,
                e.residual_absorption,
                spectrum.min_absorption()
            ),
            Err(e) => println!("{width:>8.2} {e}"),
        }
    }
    Ok(())
}
