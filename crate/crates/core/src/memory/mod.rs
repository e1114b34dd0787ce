//! Write, store and read of a signal pulse in the spin coherence of the
//! medium, by direct time-domain integration.

pub mod bloch;
pub mod protocol;

pub use bloch::{evolve, AtomicState, BlochCoefficients, Drive, SolverSettings, Trajectory};
pub use protocol::{
    retrieve, run_both_directions, run_protocol, store, EnergyBudget, MemoryReport, MemorySummary, ProtocolConfig,
    ReadDirection, SpinWave, StoredState, SwitchProfile, MIN_SETTLE_TIME, RESIDUAL_WARNING_RATIO,
};
