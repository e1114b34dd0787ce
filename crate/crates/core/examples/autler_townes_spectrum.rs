//! Absorption and dispersion of the dressed medium with the control on the
//! lower excited level: the Autler-Townes triplet, and the transparency dip
//! compared against the three-level scheme.
//!
//!     cargo run --example autler_townes_spectrum -- [rabi] [out.csv]

use raman_memory::atomic::{build_couplings, AtomModel};
use raman_memory::dressed::{
    eit_diagnostics, find_at_resonances, scan_spectrum, uniform_grid, ControlField, DressedMedium, MomentumDistribution,
    SpectrumModel,
};
use raman_memory::io::save_spectrum;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let rabi: f64 = args.next().map(|a| a.parse()).transpose()?.unwrap_or(15.0);
    let out = args.next();

    let atom = AtomModel::cesium_d1();
    let control = ControlField::new(0.0, rabi, build_couplings(&atom)?)?;
    let grid = uniform_grid(-40.0, 300.0, 34001);
    for model in [SpectrumModel::Full, SpectrumModel::Lambda, SpectrumModel::Bare] {
        let medium = DressedMedium::new(atom, control, MomentumDistribution::Frozen, model)?;
        let spectrum = scan_spectrum(&medium, &grid)?;
        println!("{model:?}");
        for p in find_at_resonances(&spectrum) {
            let width = p.fwhm.map_or("-".to_string(), |w| format!("{w:.3}"));
            println!("  peak at {:9.4}  height {:.5}  fwhm {width}", p.center, p.height);
        }
        match eit_diagnostics(&spectrum) {
            Ok(e) => println!("  transparency at {:.5}, shift {:+.3e}, residual {:.3e}", e.location, e.shift, e.residual_absorption),
            Err(e) => println!("  no transparency window: {e}"),
        }
        if let (Some(path), SpectrumModel::Full) = (&out, model) {
            save_spectrum(std::path::Path::new(path), &spectrum)?;
            println!("  wrote {path}");
        }
    }
    Ok(())
}
