//! The learning agent: network + replay buffer + exploration schedule.

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::network::{nn_init, train_step_raw, Network, Transition};
use super::policy::select_action;
use super::replay::{ExperienceTriple, ReplayBuffer};
use crate::model::{encode_state, state_encoding_len, State};
use crate::{Error, Result};

/// Hyper-parameters of the agent. All fields have working defaults; none of
/// them is sacred.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AgentParams {
    pub hidden_layers: Vec<usize>,
    pub learning_rate: f64,
    pub discount: f64,
    pub epsilon_init: f64,
    /// ε is multiplied by this after every checkpoint…
    pub epsilon_decay: f64,
    /// …but never drops below this floor.
    pub epsilon_floor: f64,
    pub replay_capacity: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for AgentParams {
    fn default() -> Self {
        AgentParams {
            hidden_layers: vec![32],
            learning_rate: 0.01,
            discount: 0.9,
            epsilon_init: 1.0,
            epsilon_decay: 0.995,
            epsilon_floor: 0.05,
            replay_capacity: 1000,
            batch_size: 32,
            seed: 0,
        }
    }
}

impl AgentParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.learning_rate > 0.0
            && self.learning_rate.is_finite()
            && (0.0..1.0).contains(&self.discount)
            && (0.0..=1.0).contains(&self.epsilon_init)
            && self.epsilon_decay > 0.0
            && self.epsilon_decay <= 1.0
            && (0.0..=1.0).contains(&self.epsilon_floor)
            && self.batch_size >= 1
            && self.replay_capacity >= self.batch_size
            && !self.hidden_layers.contains(&0);
        if ok {
            Ok(())
        } else {
            Err(Error::Invalid(format!("agent parameters out of range: {self:?}")))
        }
    }
}

/// One semi-gradient Q-learning step on a batch of experience triples.
/// States are one-hot encoded for the network; the target of each taken
/// action is `reward + discount · max_a Q(next_state, a)` (the bare reward
/// on terminal triples), frozen before the descent step. Returns the
/// pre-step loss.
pub fn train_step(net: &mut Network, batch: &[ExperienceTriple], params: &AgentParams) -> Result<f64> {
    if batch.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let n_configs = net.output_size();
    if net.input_size() != state_encoding_len(n_configs) {
        return Err(Error::Shape(format!(
            "network with {} outputs should have {} inputs, has {}",
            n_configs,
            state_encoding_len(n_configs),
            net.input_size()
        )));
    }
    let transitions: Vec<Transition> = batch
        .iter()
        .map(|t| {
            if t.action >= n_configs {
                return Err(Error::InvalidConfigId {
                    id: t.action,
                    count: n_configs,
                });
            }
            Ok(Transition {
                input: encode_state(&t.state, n_configs),
                action: t.action,
                reward: t.reward,
                next_input: t.next_state.map(|s| encode_state(&s, n_configs)),
            })
        })
        .collect::<Result<_>>()?;
    train_step_raw(net, &transitions, params.learning_rate, params.discount)
}

/// A Q-learning agent over hardware configurations.
///
/// A constructed agent is deterministic: the network weights, the
/// exploration stream and the replay sampling all derive from
/// `params.seed`.
#[derive(Debug, Clone)]
pub struct Agent {
    params: AgentParams,
    n_configs: usize,
    net: Network,
    buffer: ReplayBuffer,
    epsilon: f64,
    rng: ChaCha8Rng,
}

pub const AGENT_SCHEMA: &str = "astro-agent";
pub const AGENT_FORMAT_VERSION: u32 = 1;

/// On-disk form of an agent. The exploration RNG is not persisted; loading
/// restarts the stream from `params.seed`.
#[derive(Serialize, Deserialize)]
struct AgentFile {
    schema: String,
    format_version: u32,
    n_configs: usize,
    network: Network,
    params: AgentParams,
    epsilon: f64,
}

impl Agent {
    /// Fresh agent for a system with `n_configs` configurations.
    pub fn new(n_configs: usize, params: AgentParams) -> Result<Agent> {
        params.validate()?;
        if n_configs == 0 {
            return Err(Error::Invalid("agent needs at least one configuration".into()));
        }
        let mut sizes = vec![state_encoding_len(n_configs)];
        sizes.extend_from_slice(&params.hidden_layers);
        sizes.push(n_configs);
        let net = nn_init(&sizes, params.seed)?;
        Ok(Agent {
            epsilon: params.epsilon_init,
            buffer: ReplayBuffer::new(params.replay_capacity),
            rng: ChaCha8Rng::seed_from_u64(params.seed),
            n_configs,
            net,
            params,
        })
    }

    /// Agent around an existing value network — handy for starting from a
    /// hand-built network (all-zero weights, say) instead of a random one.
    /// The network's output width fixes `n_configs`; its input width must
    /// match the state encoding for that many configurations.
    pub fn from_network(net: Network, params: AgentParams) -> Result<Agent> {
        params.validate()?;
        net.validate()?;
        let n_configs = net.output_size();
        if net.input_size() != state_encoding_len(n_configs) {
            return Err(Error::Shape(format!(
                "network with {} outputs should have {} inputs, has {}",
                n_configs,
                state_encoding_len(n_configs),
                net.input_size()
            )));
        }
        Ok(Agent {
            epsilon: params.epsilon_init,
            buffer: ReplayBuffer::new(params.replay_capacity),
            rng: ChaCha8Rng::seed_from_u64(params.seed),
            n_configs,
            net,
            params,
        })
    }

    pub fn n_configs(&self) -> usize {
        self.n_configs
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn params(&self) -> &AgentParams {
        &self.params
    }

    pub fn network(&self) -> &Network {
        &self.net
    }

    pub fn buffer_len(&self) -> usize {
        self.buffer.len()
    }

    /// Q-value per configuration for one state.
    pub fn q_values(&self, state: &State) -> Result<Vec<f64>> {
        self.net.forward(&encode_state(state, self.n_configs))
    }

    /// ε-greedy choice among the available configurations.
    pub fn act(&mut self, state: &State, available: &[bool]) -> Result<usize> {
        let q = self.q_values(state)?;
        select_action(&q, self.epsilon, available, &mut self.rng)
    }

    /// Greedy choice (ε = 0), regardless of the exploration schedule.
    pub fn act_greedy(&mut self, state: &State, available: &[bool]) -> Result<usize> {
        let q = self.q_values(state)?;
        select_action(&q, 0.0, available, &mut self.rng)
    }

    /// Stores one experience triple in the replay buffer.
    pub fn observe(&mut self, triple: ExperienceTriple) {
        self.buffer.push(triple);
    }

    /// Runs one training step on a sampled batch, once the buffer holds at
    /// least one batch worth of experience. Returns the pre-step loss, or
    /// `None` when the buffer is still warming up.
    pub fn train_once(&mut self) -> Result<Option<f64>> {
        if self.buffer.len() < self.params.batch_size {
            return Ok(None);
        }
        let batch = self.buffer.sample(self.params.batch_size, &mut self.rng)?;
        let loss = train_step(&mut self.net, &batch, &self.params)?;
        Ok(Some(loss))
    }

    /// Applies one multiplicative ε-decay, clamped at the floor.
    pub fn decay_epsilon(&mut self) {
        self.epsilon = (self.epsilon * self.params.epsilon_decay).max(self.params.epsilon_floor);
    }

    pub fn to_json(&self) -> Result<String> {
        let file = AgentFile {
            schema: AGENT_SCHEMA.to_string(),
            format_version: AGENT_FORMAT_VERSION,
            n_configs: self.n_configs,
            network: self.net.clone(),
            params: self.params.clone(),
            epsilon: self.epsilon,
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Agent> {
        let file: AgentFile = serde_json::from_str(text)?;
        if file.schema != AGENT_SCHEMA {
            return Err(Error::Invalid(format!(
                "not an agent file (schema {:?})",
                file.schema
            )));
        }
        if file.format_version != AGENT_FORMAT_VERSION {
            return Err(Error::Invalid(format!(
                "unsupported agent format version {}",
                file.format_version
            )));
        }
        file.params.validate()?;
        file.network.validate()?;
        if file.network.output_size() != file.n_configs
            || file.network.input_size() != state_encoding_len(file.n_configs)
        {
            return Err(Error::Shape("network does not fit n_configs".into()));
        }
        Ok(Agent {
            epsilon: file.epsilon,
            buffer: ReplayBuffer::new(file.params.replay_capacity),
            rng: ChaCha8Rng::seed_from_u64(file.params.seed),
            n_configs: file.n_configs,
            net: file.network,
            params: file.params,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = self.to_json()?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Agent> {
        Agent::from_json(&std::fs::read_to_string(path)?)
    }
}
