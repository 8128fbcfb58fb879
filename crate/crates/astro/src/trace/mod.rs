//! Per-configuration execution traces: the on-disk format and a synthetic
//! generator standing in for hardware recordings.

mod format;
mod synth;

pub use format::{
    read_manifest, read_trace_set, write_trace_set, CheckpointRecord, Manifest, TraceSet,
    TRACE_FORMAT_VERSION,
};
pub use synth::{
    counter_bases, energy_slopes, generate_synthetic, PhaseModel, PhaseModels, PhaseRange,
    SyntheticSpec,
};
