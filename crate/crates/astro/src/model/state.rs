//! The state triple driving the agent, and its one-hot encoding.

use serde::{Deserialize, Serialize};

use super::{state_encoding_len, HardwareConfig, HardwarePhase, ProgramPhase, N_PROGRAM_PHASES};

/// One observation of the system: active configuration, program phase and
/// hardware phase. The total state count is `n_configs * 4 * 81`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub config: HardwareConfig,
    pub prog_phase: ProgramPhase,
    pub hw_phase: HardwarePhase,
}

/// One-hot encoding of a state for the network input layer: the active
/// configuration (`n_configs` slots), the program phase (4 slots) and one
/// 3-slot block per counter bucket. Exactly one component per block is 1,
/// six in total.
pub fn encode_state(state: &State, n_configs: usize) -> Vec<f64> {
    let mut v = vec![0.0; state_encoding_len(n_configs)];
    v[state.config.id] = 1.0;
    v[n_configs + state.prog_phase.index()] = 1.0;
    let counters_base = n_configs + N_PROGRAM_PHASES;
    for (i, &bucket) in state.hw_phase.buckets.iter().enumerate() {
        v[counters_base + i * 3 + bucket as usize] = 1.0;
    }
    v
}
