//! Table extraction from a trained agent.
//!
//! A table entry should answer: "which configuration would the agent settle
//! on for this phase?" The agent's Q-values depend on which configuration
//! the machine is *currently* on, so the question is self-referential. The
//! extraction resolves it by iterating the greedy map from configuration 0:
//! ask the agent what it would pick when on 0, then what it would pick when
//! on that answer, and so on until the answer stops moving — a
//! configuration the agent chooses *while already on it*. If the map cycles
//! instead of settling, the cycle's member with the highest stay-put value
//! wins, lowest id on ties.
//!
//! For a static table the Q-values are averaged uniformly over all 81
//! hardware phases before taking the argmax; for a hybrid table each
//! hardware phase gets its own iteration.

use crate::model::{HardwarePhase, ProgramPhase, State, Topology, N_HARDWARE_PHASES};
use crate::qlearn::Agent;
use crate::schedule::{HybridSchedule, StaticSchedule};
use crate::{Error, Result};

/// One static entry per program phase.
pub fn export_static(agent: &Agent, topology: &Topology) -> Result<StaticSchedule> {
    check_agent(agent, topology)?;
    let mut table = [0usize; crate::model::N_PROGRAM_PHASES];
    for phase in ProgramPhase::ALL {
        table[phase.index()] = settle(agent, topology, phase, None)?;
    }
    StaticSchedule::new(*topology, table)
}

/// One hybrid entry per (program phase, hardware phase) pair.
pub fn export_hybrid(agent: &Agent, topology: &Topology) -> Result<HybridSchedule> {
    check_agent(agent, topology)?;
    let mut table = Vec::with_capacity(crate::model::N_PROGRAM_PHASES * N_HARDWARE_PHASES);
    for phase in ProgramPhase::ALL {
        for hw in 0..N_HARDWARE_PHASES {
            table.push(settle(agent, topology, phase, Some(hw))?);
        }
    }
    HybridSchedule::new(*topology, table)
}

fn check_agent(agent: &Agent, topology: &Topology) -> Result<()> {
    if agent.n_configs() != topology.n_configs() {
        return Err(Error::Shape(format!(
            "agent knows {} configurations, topology has {}",
            agent.n_configs(),
            topology.n_configs()
        )));
    }
    Ok(())
}

/// Q-values for `phase` when the machine is on configuration `current`:
/// a single evaluation when a hardware phase is given, the uniform average
/// over all 81 otherwise.
fn mean_q(
    agent: &Agent,
    topology: &Topology,
    phase: ProgramPhase,
    hw: Option<usize>,
    current: usize,
) -> Result<Vec<f64>> {
    let config = topology.config(current)?;
    let state_q = |hw_index: usize| -> Result<Vec<f64>> {
        agent.q_values(&State {
            config,
            prog_phase: phase,
            hw_phase: HardwarePhase::from_index(hw_index)?,
        })
    };
    match hw {
        Some(hw_index) => state_q(hw_index),
        None => {
            let mut acc = vec![0.0; agent.n_configs()];
            for hw_index in 0..N_HARDWARE_PHASES {
                for (a, q) in acc.iter_mut().zip(state_q(hw_index)?) {
                    *a += q;
                }
            }
            for a in &mut acc {
                *a /= N_HARDWARE_PHASES as f64;
            }
            Ok(acc)
        }
    }
}

fn greedy(q: &[f64]) -> usize {
    let mut best = 0;
    for (id, &value) in q.iter().enumerate().skip(1) {
        if value > q[best] {
            best = id;
        }
    }
    best
}

/// Iterates `current ← argmax_a meanQ(current)[a]` from configuration 0
/// until the choice reproduces itself. Orbits over a finite set either
/// settle or cycle; a cycle is resolved by the member with the highest
/// stay-put value `meanQ(c)[c]`, lowest id winning ties.
fn settle(
    agent: &Agent,
    topology: &Topology,
    phase: ProgramPhase,
    hw: Option<usize>,
) -> Result<usize> {
    let mut orbit = vec![0usize];
    loop {
        let current = *orbit.last().expect("orbit starts non-empty");
        let next = greedy(&mean_q(agent, topology, phase, hw, current)?);
        if next == current {
            return Ok(current);
        }
        if let Some(pos) = orbit.iter().position(|&c| c == next) {
            let mut members: Vec<usize> = orbit[pos..].to_vec();
            members.sort_unstable();
            let mut best: Option<(usize, f64)> = None;
            for &member in &members {
                let stay = mean_q(agent, topology, phase, hw, member)?[member];
                if best.is_none_or(|(_, incumbent)| stay > incumbent) {
                    best = Some((member, stay));
                }
            }
            return Ok(best.expect("cycle has at least two members").0);
        }
        orbit.push(next);
    }
}
