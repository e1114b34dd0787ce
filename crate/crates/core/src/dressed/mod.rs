//! Control-dressed probe susceptibility of the four-level D1 scheme.

pub mod analysis;
pub mod control;
pub mod greens;
pub mod momentum;
pub mod spectrum;

pub use analysis::{
    eit_diagnostics, find_at_resonances, find_resonance_near, optical_depth, optical_depth_from_absorption, EitDiagnostics, Resonance,
};
pub use control::ControlField;
pub use greens::{greens_matrix, greens_matrix_derivative, quasi_energies, DressedGreens, ExcitedState};
pub use momentum::{gauss_hermite, MomentumDistribution, MomentumSample};
pub use spectrum::{
    scan_spectrum, susceptibility, uniform_grid, DressedMedium, SpectrumModel, SusceptibilitySource,
    SusceptibilitySpectrum, DIPOLE_SCALE,
};
