//! Light storage by off-resonant Raman scattering in a multilevel alkali
//! medium.
//!
//! All frequencies are in units of the excited-state decay rate gamma and all
//! times in units of 1/gamma. Susceptibilities are scaled by `n0 lambdabar^3`.
//!
//! * [`atomic`]: angular-momentum algebra and D1 dipole factors.
//! * [`dressed`]: dressed propagators and the probe susceptibility.
//! * [`transport`]: linear pulse propagation in the frequency domain.
//! * [`memory`]: time-domain write/store/read protocol.
//! * [`experiment`]: configuration, presets, sweeps and file output.

pub mod atomic;
pub mod dressed;
pub mod error;
pub mod experiment;
pub mod io;
pub mod memory;
pub mod transport;

pub use error::{Error, Result};
