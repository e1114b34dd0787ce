//! Wigner symbols and the D1 dipole factors they produce for the four-level
//! scheme used throughout the crate.
//!
//!     cargo run --example angular_couplings -- [nuclear_spin]

use raman_memory::atomic::{build_couplings, wigner_3j_f64, wigner_6j_f64, AtomModel, HalfInt, Sublevel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spin: f64 = std::env::args().nth(1).map(|a| a.parse()).transpose()?.unwrap_or(3.5);

    println!("( 1   1   1 ; 1 -1  0) = {:+.6}", wigner_3j_f64(1.0, 1.0, 1.0, 1.0, -1.0, 0.0)?);
    println!("(1/2 1/2  1 ; 1/2 1/2 -1) = {:+.6}", wigner_3j_f64(0.5, 0.5, 1.0, 0.5, 0.5, -1.0)?);
    println!("{{ 1   1   1 ; 1   1   1}} = {:+.6}", wigner_6j_f64(1.0, 1.0, 1.0, 1.0, 1.0, 1.0)?);
    // Non-half-integer arguments are rejected rather than rounded.
    if let Err(e) = wigner_3j_f64(0.3, 1.0, 1.0, 0.0, 0.0, 0.0) {
        println!("j = 0.3 -> {e}");
    }

    let atom = AtomModel::new(HalfInt::angular_momentum(spin)?, 256.0)?;
    let c = build_couplings(&atom)?;
    let show = |s: Sublevel| format!("|F={}, M={}>", s.f.value(), s.m.value());
    println!();
    println!(
        "I = {spin}: m = {}, m' = {}, n = {}, n' = {}",
        show(atom.state_m()),
        show(atom.state_m_prime()),
        show(atom.state_n()),
        show(atom.state_n_prime())
    );
    println!("probe   m -> n   {:+.6}", c.probe_to_n);
    println!("probe   m -> n'  {:+.6}", c.probe_to_nprime);
    println!("control m'-> n   {:+.6}", c.control_to_n);
    println!("control m'-> n'  {:+.6}", c.control_to_nprime);
    println!("control ratio rho = {:+.6} (rho^2 = {:.6})", c.control_ratio(), c.control_ratio().powi(2));
    println!("probe ratio       = {:+.6}", c.probe_ratio());
    Ok(())
}
