//! Linear propagation of finite signal pulses through the dressed medium.

pub mod propagate;
pub mod pulse;

pub use propagate::{
    energy, overlap, propagate_pulse, pulse_metrics, transfer_function, FieldRecord, FieldSlice, MediumSpec,
    PulseMetrics, Sampling, SpectralWindow, LEAK_WARNING_THRESHOLD,
};
pub use pulse::{mode_overlap, PulseShape, PulseSpec};
