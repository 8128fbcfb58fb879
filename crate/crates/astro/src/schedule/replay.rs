//! Running a frozen table against a trace set.

use crate::schedule::Schedule;
use crate::sim::{run_episode, RunResult, SimParams};
use crate::trace::TraceSet;
use crate::{Error, Result};

/// Replays a schedule under the same rules as every live policy: at each
/// checkpoint the table is consulted with the segment's program phase (and,
/// for a hybrid table, the hardware phase of the record the currently
/// adopted configuration produced), the answer goes through availability
/// resolution, and switches after the first checkpoint pay the penalties.
/// No learning machinery is involved and nothing is random, so the result
/// is a pure function of the trace set, the table and the parameters.
pub fn replay_schedule(
    ts: &TraceSet,
    schedule: &Schedule,
    params: &SimParams,
) -> Result<RunResult> {
    if schedule.topology() != ts.topology() {
        return Err(Error::Invalid(format!(
            "schedule is for a {}B/{}L machine, trace set is {}B/{}L",
            schedule.topology().n_big,
            schedule.topology().n_little,
            ts.topology().n_big,
            ts.topology().n_little
        )));
    }
    let name = format!("replay-{}", schedule.kind());
    run_episode(ts, params, &name, 0, |view| {
        Ok(schedule.lookup(view.state.prog_phase, &view.state.hw_phase))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ProgramPhase, N_HARDWARE_PHASES, N_PROGRAM_PHASES};
    use crate::schedule::{HybridSchedule, StaticSchedule};
    use crate::sim::{greedy_oracle, run_fixed, Metric};
    use crate::trace::{generate_synthetic, PhaseRange, SyntheticSpec};

    fn phased_set() -> TraceSet {
        generate_synthetic(&SyntheticSpec {
            n_big: 2,
            n_little: 2,
            k: 12,
            seed: 17,
            phases: vec![
                PhaseRange { from: 0, to: 3, phase: ProgramPhase::CPUBound },
                PhaseRange { from: 4, to: 7, phase: ProgramPhase::IOBound },
                PhaseRange { from: 8, to: 9, phase: ProgramPhase::Blocked },
                PhaseRange { from: 10, to: 11, phase: ProgramPhase::Other },
            ],
            ..Default::default()
        })
        .unwrap()
    }

    #[test]
    fn constant_table_equals_run_fixed_exactly() {
        let ts = phased_set();
        let params = SimParams::default();
        for id in [0, 3, ts.n_configs() - 1] {
            let table = Schedule::from(
                StaticSchedule::new(*ts.topology(), [id; N_PROGRAM_PHASES]).unwrap(),
            );
            let replayed = replay_schedule(&ts, &table, &params).unwrap();
            let fixed = run_fixed(&ts, id, &params).unwrap();
            assert_eq!(replayed.total_time_s, fixed.total_time_s);
            assert_eq!(replayed.total_energy_j, fixed.total_energy_j);
            assert_eq!(replayed.total_instructions, fixed.total_instructions);
            assert_eq!(replayed.adopted_sequence(), vec![id; ts.k()]);
        }
    }

    #[test]
    fn static_replay_follows_the_program_phases() {
        let ts = phased_set();
        let table = Schedule::from(
            // Blocked, IOBound, CPUBound, Other in index order.
            StaticSchedule::new(*ts.topology(), [1, 2, 7, 0]).unwrap(),
        );
        let result = replay_schedule(&ts, &table, &SimParams::default()).unwrap();
        let expected: Vec<usize> = ts
            .phases()
            .iter()
            .map(|p| [1, 2, 7, 0][p.index()])
            .collect();
        assert_eq!(result.adopted_sequence(), expected);
        // Three phase boundaries after checkpoint 0 → three switches.
        assert_eq!(result.log.iter().filter(|r| r.switched).count(), 3);
    }

    #[test]
    fn replay_is_deterministic() {
        let ts = phased_set();
        let table = Schedule::from(
            StaticSchedule::new(*ts.topology(), [1, 2, 7, 0]).unwrap(),
        );
        let a = replay_schedule(&ts, &table, &SimParams::default()).unwrap();
        let b = replay_schedule(&ts, &table, &SimParams::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn hybrid_replay_accounts_cleanly_and_never_misses_a_lookup() {
        let ts = phased_set();
        let n = ts.n_configs();
        let table: Vec<usize> = (0..N_PROGRAM_PHASES * N_HARDWARE_PHASES)
            .map(|i| i % n)
            .collect();
        let schedule = Schedule::from(HybridSchedule::new(*ts.topology(), table).unwrap());
        let result = replay_schedule(&ts, &schedule, &SimParams::default()).unwrap();
        assert_eq!(result.log.len(), ts.k());
        assert_eq!(result.policy, "replay-hybrid");
        let time: f64 = result.log.iter().map(|r| r.time_s + r.penalty_time_s).sum();
        assert_eq!(result.total_time_s, time);
    }

    #[test]
    fn zero_penalty_oracle_lower_bounds_any_replay() {
        let ts = phased_set();
        let params = SimParams::default().zero_penalty();
        let time_floor = greedy_oracle(&ts, Metric::Time, &params).unwrap().total_time_s;
        let energy_floor = greedy_oracle(&ts, Metric::Energy, &params)
            .unwrap()
            .total_energy_j;
        for seed in 0..8u64 {
            // Arbitrary but valid tables.
            let table: [usize; N_PROGRAM_PHASES] = [
                (seed as usize) % ts.n_configs(),
                (seed as usize + 1) % ts.n_configs(),
                (seed as usize + 2) % ts.n_configs(),
                (seed as usize + 3) % ts.n_configs(),
            ];
            let schedule =
                Schedule::from(StaticSchedule::new(*ts.topology(), table).unwrap());
            let result = replay_schedule(&ts, &schedule, &params).unwrap();
            assert!(result.total_time_s >= time_floor);
            assert!(result.total_energy_j >= energy_floor);
        }
    }

    #[test]
    fn wrong_machine_is_rejected() {
        let ts = phased_set();
        let other = crate::model::Topology::new(4, 4).unwrap();
        let schedule =
            Schedule::from(StaticSchedule::new(other, [0; N_PROGRAM_PHASES]).unwrap());
        assert!(replay_schedule(&ts, &schedule, &SimParams::default()).is_err());
    }
}
