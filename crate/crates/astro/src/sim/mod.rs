//! Checkpoint-by-checkpoint execution of a [`TraceSet`](crate::trace::TraceSet)
//! under a configuration-selection policy.
//!
//! All policies share one contract: the machine boots on configuration 0
//! (except [`run_fixed`], which is the machine), the first checkpoint's
//! adoption is free, and every later checkpoint that lands on a different
//! configuration pays the switch penalties from [`SimParams`]. What a
//! segment costs is whatever the adopted configuration's trace recorded for
//! it — the simulator never invents numbers, it only routes between
//! pre-recorded alternatives.

mod engine;
mod policies;
mod result;

pub use engine::{
    chg, run_episode, state_at, step_row, Availability, AvailabilitySampler, SimParams, StepView,
};
pub use policies::{
    best_fixed, evaluate_greedy, greedy_oracle, run_astro, run_astro_with_agent, run_fixed,
    run_random,
};
pub use result::{LogRow, Metric, RunResult, RunSummary, RUN_FORMAT_VERSION, RUN_SCHEMA};
