//! Trace-driven workbench for scheduling programs on big.LITTLE processors.
//!
//! The pipeline has five stops, mirrored by the `astro` command line tool:
//!
//! 1. [`mine`] — parse function summaries from a small textual IR and
//!    classify each function into a program phase.
//! 2. [`trace`] — record or synthesize one execution trace per hardware
//!    configuration, split into equal-progress checkpoints.
//! 3. [`qlearn`] + [`sim`] — train a Q-learning agent that picks a
//!    configuration at every checkpoint, and compare it against greedy
//!    oracles, best-fixed and random baselines.
//! 4. [`cli::cmd_compare`] — score policies against energy/slowdown
//!    thresholds.
//! 5. [`schedule`] — freeze a trained agent into static or hybrid
//!    lookup tables and replay them.
//!
//! The shared vocabulary (configurations, phases, states, reward) lives in
//! [`model`].

pub mod cli;
pub mod error;
pub mod mine;
pub mod model;
pub mod qlearn;
pub mod schedule;
pub mod sim;
pub mod trace;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
