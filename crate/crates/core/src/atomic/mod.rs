//! Angular-momentum algebra and the D1 level scheme.

pub mod structure;
pub mod wigner;

pub use structure::{
    build_couplings, d1_dipole_factor, AtomModel, CouplingSet, Sublevel, CESIUM_D1_HYPERFINE_SPLITTING, CESIUM_NUCLEAR_SPIN,
    D1_ELECTRONIC_J,
};
pub use wigner::{clebsch_gordan, wigner_3j, wigner_3j_f64, wigner_6j, wigner_6j_f64, HalfInt};
