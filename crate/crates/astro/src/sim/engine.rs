//! The checkpoint loop shared by every policy.
//!
//! A run walks the segments of a [`TraceSet`] in order. At each checkpoint
//! the engine shows the policy the pre-decision state (current configuration,
//! program phase of the upcoming segment, hardware phase bucketed from the
//! current configuration's counters) together with the availability mask,
//! takes the requested configuration, resolves it through [`chg`], charges a
//! switch penalty when the adopted configuration differs from the running one
//! (never at the very first checkpoint — the machine has to boot into
//! *something*), and then pays the adopted configuration's recorded time and
//! energy for the segment.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::{hardware_phase, RewardParams, State};
use crate::sim::result::{LogRow, RunResult};
use crate::trace::TraceSet;
use crate::{Error, Result};

/// Which configurations may be adopted at a checkpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Availability {
    /// Every configuration, every checkpoint.
    Always,
    /// Configuration `i` is independently available with probability
    /// `probs[i]`, redrawn at each checkpoint from a dedicated
    /// deterministic stream. The currently running configuration is always
    /// available — a machine can keep doing what it is doing.
    Stochastic { probs: Vec<f64>, seed: u64 },
}

impl Default for Availability {
    fn default() -> Self {
        Availability::Always
    }
}

impl Availability {
    fn validate(&self, n_configs: usize) -> Result<()> {
        if let Availability::Stochastic { probs, .. } = self {
            if probs.len() != n_configs {
                return Err(Error::Invalid(format!(
                    "availability lists {} probabilities for {} configurations",
                    probs.len(),
                    n_configs
                )));
            }
            for (id, p) in probs.iter().enumerate() {
                if !(p.is_finite() && (0.0..=1.0).contains(p)) {
                    return Err(Error::Invalid(format!(
                        "availability probability {p} for configuration {id} \
                         is outside [0, 1]"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Live sampler behind an [`Availability`]. One checkpoint = one call to
/// [`AvailabilitySampler::mask`]; the stochastic variant draws exactly
/// `n_configs` uniforms per call (in id order) so the stream position is a
/// pure function of how many checkpoints have passed.
#[derive(Debug, Clone)]
pub struct AvailabilitySampler {
    probs: Option<Vec<f64>>,
    rng: ChaCha8Rng,
}

impl AvailabilitySampler {
    pub fn new(availability: &Availability) -> AvailabilitySampler {
        match availability {
            Availability::Always => AvailabilitySampler {
                probs: None,
                rng: ChaCha8Rng::seed_from_u64(0),
            },
            Availability::Stochastic { probs, seed } => AvailabilitySampler {
                probs: Some(probs.clone()),
                rng: ChaCha8Rng::seed_from_u64(*seed),
            },
        }
    }

    /// Mask for the next checkpoint. `current` is forced available.
    pub fn mask(&mut self, n_configs: usize, current: usize) -> Vec<bool> {
        let mut mask = match &self.probs {
            None => vec![true; n_configs],
            Some(probs) => probs.iter().map(|&p| self.rng.random::<f64>() < p).collect(),
        };
        mask[current] = true;
        mask
    }
}

/// Everything about the machine and the run that is not the policy itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimParams {
    /// Seconds lost whenever a checkpoint adopts a different configuration.
    pub switch_time_s: f64,
    /// Joules burned by the same event.
    pub switch_energy_j: f64,
    pub availability: Availability,
    /// Training episodes for the learning policy; other policies run once.
    pub episodes: usize,
    /// Seed for policies that draw their own randomness (random, learning).
    pub seed: u64,
    /// Shape of the reward handed to the learning policy.
    pub reward: RewardParams,
}

impl Default for SimParams {
    fn default() -> Self {
        SimParams {
            switch_time_s: 0.050,
            switch_energy_j: 0.05,
            availability: Availability::Always,
            episodes: 50,
            seed: 0,
            reward: RewardParams::default(),
        }
    }
}

impl SimParams {
    pub fn validate(&self, n_configs: usize) -> Result<()> {
        if !(self.switch_time_s.is_finite() && self.switch_time_s >= 0.0) {
            return Err(Error::Invalid(format!(
                "negative switch time {}",
                self.switch_time_s
            )));
        }
        if !(self.switch_energy_j.is_finite() && self.switch_energy_j >= 0.0) {
            return Err(Error::Invalid(format!(
                "negative switch energy {}",
                self.switch_energy_j
            )));
        }
        if self.episodes == 0 {
            return Err(Error::Invalid("episodes must be at least 1".into()));
        }
        self.reward.validate()?;
        self.availability.validate(n_configs)
    }

    /// Same parameters with both switch penalties zeroed.
    pub fn zero_penalty(mut self) -> SimParams {
        self.switch_time_s = 0.0;
        self.switch_energy_j = 0.0;
        self
    }
}

/// Configuration-change resolution: an unavailable request leaves the
/// machine on its current configuration.
pub fn chg(requested: usize, current: usize, available: &[bool]) -> usize {
    if available.get(requested).copied().unwrap_or(false) {
        requested
    } else {
        current
    }
}

/// What a policy sees when it is asked for a configuration.
pub struct StepView<'a> {
    pub segment: usize,
    pub state: &'a State,
    pub available: &'a [bool],
    pub current: usize,
}

/// Pre-decision state at a checkpoint: the configuration the machine is on,
/// the program phase of the segment about to run, and the hardware phase
/// bucketed from what that configuration's trace recorded for it.
pub fn state_at(ts: &TraceSet, segment: usize, current: usize) -> Result<State> {
    let record = &ts.records(current)?[segment];
    Ok(State {
        config: ts.topology().config(current)?,
        prog_phase: record.prog_phase,
        hw_phase: hardware_phase(&record.counters)?,
    })
}

/// Runs one episode of `decide` over the whole trace set, charging switch
/// penalties and summing adopted-configuration records. The machine starts
/// on configuration 0; the first checkpoint's adoption is free.
pub fn run_episode<F>(
    ts: &TraceSet,
    params: &SimParams,
    policy: &str,
    seed: u64,
    mut decide: F,
) -> Result<RunResult>
where
    F: FnMut(&StepView<'_>) -> Result<usize>,
{
    params.validate(ts.n_configs())?;
    let mut sampler = AvailabilitySampler::new(&params.availability);
    let mut current = 0usize;
    let mut log = Vec::with_capacity(ts.k());
    for segment in 0..ts.k() {
        let available = sampler.mask(ts.n_configs(), current);
        let state = state_at(ts, segment, current)?;
        let requested = decide(&StepView {
            segment,
            state: &state,
            available: &available,
            current,
        })?;
        if requested >= ts.n_configs() {
            return Err(Error::InvalidConfigId {
                id: requested,
                count: ts.n_configs(),
            });
        }
        log.push(step_row(
            ts, params, segment, &state, requested, current, &available,
        )?);
        current = log.last().expect("just pushed").adopted;
    }
    Ok(RunResult::from_log(policy, seed, log))
}

/// Resolves one decision into a log row: applies [`chg`], charges the switch
/// penalty when a checkpoint after the first lands on a new configuration,
/// and reads the adopted configuration's record for the segment. The reward
/// column reflects the adopted record alone; penalties show up only in the
/// penalty columns (and therefore in the totals).
pub fn step_row(
    ts: &TraceSet,
    params: &SimParams,
    segment: usize,
    state: &State,
    requested: usize,
    current: usize,
    available: &[bool],
) -> Result<LogRow> {
    let adopted = chg(requested, current, available);
    let switched = segment > 0 && adopted != current;
    let record = &ts.records(adopted)?[segment];
    let reward = crate::model::reward(
        record.energy_j,
        record.instructions,
        record.time_s,
        &params.reward,
    )?;
    Ok(LogRow {
        segment,
        state: *state,
        requested,
        adopted,
        switched,
        time_s: record.time_s,
        energy_j: record.energy_j,
        penalty_time_s: if switched { params.switch_time_s } else { 0.0 },
        penalty_energy_j: if switched { params.switch_energy_j } else { 0.0 },
        instructions: record.instructions,
        reward,
    })
}
