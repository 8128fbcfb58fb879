//! The configuration-selection policies: fixed machines, per-checkpoint
//! oracles, a uniform-random baseline, and the learning policy.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::qlearn::{Agent, AgentParams, ExperienceTriple};
use crate::sim::engine::{run_episode, state_at, step_row, AvailabilitySampler, SimParams};
use crate::sim::result::{Metric, RunResult};
use crate::trace::TraceSet;
use crate::{Error, Result};

/// Never switches: the whole program runs on `config_id`. Availability does
/// not apply (a machine that only has one configuration is always "on" it),
/// no penalties are ever charged, and the totals are plain column sums of
/// the configuration's trace — independent of any seed.
pub fn run_fixed(ts: &TraceSet, config_id: usize, params: &SimParams) -> Result<RunResult> {
    params.validate(ts.n_configs())?;
    ts.records(config_id)?; // fail early on a bad id
    let all = vec![true; ts.n_configs()];
    let mut log = Vec::with_capacity(ts.k());
    for segment in 0..ts.k() {
        let state = state_at(ts, segment, config_id)?;
        log.push(step_row(
            ts, params, segment, &state, config_id, config_id, &all,
        )?);
    }
    Ok(RunResult::from_log(format!("fixed:{config_id}"), 0, log))
}

/// The best single configuration under `metric`: runs [`run_fixed`] for
/// every configuration and keeps the smallest total, lowest id on ties.
pub fn best_fixed(
    ts: &TraceSet,
    metric: Metric,
    params: &SimParams,
) -> Result<(usize, RunResult)> {
    let mut best: Option<(usize, RunResult)> = None;
    for id in 0..ts.n_configs() {
        let result = run_fixed(ts, id, params)?;
        let better = match &best {
            None => true,
            Some((_, incumbent)) => metric.total(&result) < metric.total(incumbent),
        };
        if better {
            best = Some((id, result));
        }
    }
    let (id, mut result) = best.expect("a trace set has at least one configuration");
    result.policy = format!("best-fixed-{metric}");
    Ok((id, result))
}

/// Per-checkpoint oracle: reads the upcoming segment's records for every
/// available configuration and adopts the one with the smallest
/// `metric + switch penalty` cost, lowest id on ties. Greedy, not globally
/// optimal — with nonzero penalties a locally best switch can lose later —
/// but with zero penalties the greedy choice is exactly the per-segment
/// minimum, which no sequence of adoptions can beat.
pub fn greedy_oracle(ts: &TraceSet, metric: Metric, params: &SimParams) -> Result<RunResult> {
    run_episode(ts, params, &format!("oracle-{metric}"), 0, |view| {
        let mut best: Option<(usize, f64)> = None;
        for id in 0..ts.n_configs() {
            if !view.available[id] {
                continue;
            }
            let record = &ts.records(id)?[view.segment];
            let mut cost = metric.of_segment(record.time_s, record.energy_j);
            if view.segment > 0 && id != view.current {
                cost += metric.penalty(params);
            }
            if best.is_none_or(|(_, incumbent)| cost < incumbent) {
                best = Some((id, cost));
            }
        }
        Ok(best.expect("the current configuration is always available").0)
    })
}

/// Adopts a uniformly random available configuration at every checkpoint.
/// Deterministic in `seed` (which is independent of the availability seed).
pub fn run_random(ts: &TraceSet, params: &SimParams, seed: u64) -> Result<RunResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    run_episode(ts, params, "random", seed, |view| {
        let ids: Vec<usize> = (0..ts.n_configs())
            .filter(|&id| view.available[id])
            .collect();
        Ok(ids[rng.random_range(0..ids.len())])
    })
}

/// Trains a fresh agent on the trace set and returns the final episode's
/// run together with the trained agent.
pub fn run_astro(
    ts: &TraceSet,
    agent_params: AgentParams,
    sim_params: &SimParams,
) -> Result<(RunResult, Agent)> {
    let mut agent = Agent::new(ts.n_configs(), agent_params)?;
    let result = run_astro_with_agent(ts, &mut agent, sim_params)?;
    Ok((result, agent))
}

/// The learning policy. Each episode replays the trace set from segment 0
/// on configuration 0. At every checkpoint the agent picks ε-greedily among
/// the available configurations; the *adopted* configuration (after
/// availability resolution) is stored as the transition's action, its
/// record's reward as the transition's reward, and the post-adoption state
/// at the next checkpoint as the successor (none at the last segment). One
/// replay-batch gradient step and one ε decay happen per checkpoint. The
/// returned result is the final episode's log; the availability stream runs
/// continuously across episodes.
pub fn run_astro_with_agent(
    ts: &TraceSet,
    agent: &mut Agent,
    params: &SimParams,
) -> Result<RunResult> {
    params.validate(ts.n_configs())?;
    if agent.n_configs() != ts.n_configs() {
        return Err(Error::Shape(format!(
            "agent knows {} configurations, trace set has {}",
            agent.n_configs(),
            ts.n_configs()
        )));
    }
    let mut sampler = AvailabilitySampler::new(&params.availability);
    let mut last = None;
    for _ in 0..params.episodes {
        let mut current = 0usize;
        let mut log = Vec::with_capacity(ts.k());
        for segment in 0..ts.k() {
            let available = sampler.mask(ts.n_configs(), current);
            let state = state_at(ts, segment, current)?;
            let requested = agent.act(&state, &available)?;
            let row = step_row(ts, params, segment, &state, requested, current, &available)?;
            let next_state = if segment + 1 < ts.k() {
                Some(state_at(ts, segment + 1, row.adopted)?)
            } else {
                None
            };
            agent.observe(ExperienceTriple {
                state,
                action: row.adopted,
                reward: row.reward,
                next_state,
            });
            agent.train_once()?;
            agent.decay_epsilon();
            current = row.adopted;
            log.push(row);
        }
        last = Some(RunResult::from_log("astro", params.seed, log));
    }
    Ok(last.expect("episodes >= 1"))
}

/// One evaluation pass with a frozen agent: greedy everywhere (ε = 0), no
/// observation, no training, no ε decay.
pub fn evaluate_greedy(ts: &TraceSet, agent: &mut Agent, params: &SimParams) -> Result<RunResult> {
    if agent.n_configs() != ts.n_configs() {
        return Err(Error::Shape(format!(
            "agent knows {} configurations, trace set has {}",
            agent.n_configs(),
            ts.n_configs()
        )));
    }
    run_episode(ts, params, "astro-greedy", params.seed, |view| {
        agent.act_greedy(view.state, view.available)
    })
}
