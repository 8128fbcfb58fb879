//! Domain vocabulary shared by every other module: hardware configurations,
//! program and hardware phases, counter readings, states and the reward.
//!
//! Everything here is an immutable value and every operation is a pure
//! function, so all of it is safe to use from any number of workers.

mod config;
mod counters;
mod phase;
mod reward;
mod state;

pub use config::{enumerate_configs, HardwareConfig, Topology};
pub use counters::{bucketize, hardware_phase, CounterKind, CounterReading, HardwarePhase};
pub use phase::ProgramPhase;
pub use reward::{reward, RewardParams};
pub use state::{encode_state, State};

/// Number of program phases.
pub const N_PROGRAM_PHASES: usize = 4;

/// Number of hardware phases (3 buckets per counter, 4 counters).
pub const N_HARDWARE_PHASES: usize = 81;

/// Length of the one-hot state encoding for a topology with `n_configs`
/// configurations: config block + phase block + one 3-wide block per counter.
pub const fn state_encoding_len(n_configs: usize) -> usize {
    n_configs + N_PROGRAM_PHASES + 4 * 3
}
