//! The learning engine: a small feed-forward network trained by
//! back-propagation, a replay buffer of experience triples, ε-greedy action
//! selection, and the agent tying them together.
//!
//! Everything is seeded explicitly; identical seeds and inputs give
//! bit-identical training trajectories.

mod agent;
mod network;
mod policy;
mod replay;

pub use agent::{train_step, Agent, AgentParams, AGENT_FORMAT_VERSION, AGENT_SCHEMA};
pub use network::{
    compute_targets, gradients_with_targets, loss_with_targets, nn_init, train_step_raw, Network,
    Transition,
};
pub use policy::select_action;
pub use replay::{ExperienceTriple, ReplayBuffer};
