//! Code-level features and the phase classifier.

use serde::{Deserialize, Serialize};

use super::FunctionSummary;
use crate::model::ProgramPhase;
use crate::{Error, Result};

/// Feature vector of one function. Densities are instruction counts
/// normalized by this function's instruction total, so each lies in [0, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub io_dens: f64,
    pub mem_dens: f64,
    pub int_dens: f64,
    pub fp_dens: f64,
    pub locks_dens: f64,
    pub barrier: bool,
    pub net: bool,
    pub sleep: bool,
    /// Expected I/O volume: sum of 10^n over I/O calls nested in n loops.
    pub io_weight: f64,
    /// Maximum loop-nesting depth.
    pub nesting_factor: u32,
}

/// I/O weight heuristic: each call nested in `n` loops contributes `10^n`.
pub fn io_weight(io_calls: &[u32]) -> f64 {
    // fold instead of sum: f64's Sum identity is -0.0, which would leak
    // a "-0.0" into serialized feature vectors of I/O-free functions
    io_calls
        .iter()
        .fold(0.0, |acc, &n| acc + 10f64.powi(n as i32))
}

/// Computes the feature vector of a mined function summary.
pub fn extract_features(summary: &FunctionSummary) -> Result<FeatureVector> {
    if summary.total_instr == 0 {
        return Err(Error::InvalidSummary(summary.name.clone()));
    }
    let total = summary.total_instr as f64;
    Ok(FeatureVector {
        io_dens: summary.io_calls.len() as f64 / total,
        mem_dens: summary.mem_ops as f64 / total,
        int_dens: summary.int_alu as f64 / total,
        fp_dens: summary.fp_alu as f64 / total,
        locks_dens: summary.lock_ops as f64 / total,
        barrier: summary.calls_barrier,
        net: summary.calls_net,
        sleep: summary.calls_sleep,
        io_weight: io_weight(&summary.io_calls),
        nesting_factor: summary.max_loop_nest,
    })
}

/// Classifies a feature vector into its program phase.
///
/// The four predicates are tried in a fixed order and the first hit wins:
///
/// 1. Blocked:  barrier or net or sleep, or locks density > 0.5
/// 2. IOBound:  I/O density + memory density > 0.5, and locks density = 0
/// 3. CPUBound: integer density + float density > 0.5
/// 4. Other:    none of the above
pub fn classify_phase(f: &FeatureVector) -> ProgramPhase {
    if f.barrier || f.net || f.sleep || f.locks_dens > 0.5 {
        ProgramPhase::Blocked
    } else if f.io_dens + f.mem_dens > 0.5 && f.locks_dens == 0.0 {
        ProgramPhase::IOBound
    } else if f.int_dens + f.fp_dens > 0.5 {
        ProgramPhase::CPUBound
    } else {
        ProgramPhase::Other
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plain(io: f64, mem: f64, int: f64, fp: f64, locks: f64) -> FeatureVector {
        FeatureVector {
            io_dens: io,
            mem_dens: mem,
            int_dens: int,
            fp_dens: fp,
            locks_dens: locks,
            barrier: false,
            net: false,
            sleep: false,
            io_weight: 0.0,
            nesting_factor: 0,
        }
    }

    #[test]
    fn io_weight_examples() {
        assert_eq!(io_weight(&[2]), 100.0);
        assert_eq!(io_weight(&[0, 1]), 11.0);
        assert_eq!(io_weight(&[]), 0.0);
        // positive zero, so serialized features never show "-0.0"
        assert!(io_weight(&[]).is_sign_positive());
    }

    #[test]
    fn io_weight_monotone_in_calls_and_depth() {
        let base = io_weight(&[0, 2, 1]);
        assert!(io_weight(&[0, 2, 1, 0]) > base);
        // deepening one call by a loop multiplies its contribution by 10
        assert_eq!(io_weight(&[3]), 10.0 * io_weight(&[2]));
    }

    #[test]
    fn density_extraction() {
        let mut s = FunctionSummary {
            name: "f".into(),
            total_instr: 100,
            io_calls: vec![],
            mem_ops: 30,
            int_alu: 20,
            fp_alu: 10,
            lock_ops: 0,
            calls_barrier: false,
            calls_net: false,
            calls_sleep: false,
            max_loop_nest: 0,
            blocking_calls: vec![],
        };
        let f = extract_features(&s).unwrap();
        assert_eq!(f.mem_dens, 0.30);
        assert_eq!(f.int_dens, 0.20);
        assert_eq!(f.fp_dens, 0.10);

        s.total_instr = 10;
        s.mem_ops = 0;
        s.int_alu = 0;
        s.fp_alu = 0;
        s.io_calls = vec![1, 1];
        let f = extract_features(&s).unwrap();
        assert_eq!(f.io_dens, 0.2);
        assert_eq!(f.io_weight, 20.0);

        s.total_instr = 0;
        assert!(matches!(extract_features(&s), Err(Error::InvalidSummary(_))));
    }

    #[test]
    fn blocked_wins_over_everything() {
        let mut f = plain(0.0, 0.0, 0.0, 0.0, 0.0);
        f.barrier = true;
        assert_eq!(classify_phase(&f), ProgramPhase::Blocked);
        let heavy_locks = plain(0.0, 0.0, 0.2, 0.2, 0.6);
        assert_eq!(classify_phase(&heavy_locks), ProgramPhase::Blocked);
    }

    #[test]
    fn io_bound_requires_no_locks() {
        assert_eq!(
            classify_phase(&plain(0.3, 0.3, 0.0, 0.0, 0.0)),
            ProgramPhase::IOBound
        );
        // any lock density disqualifies IOBound; falls through to Other here
        assert_eq!(
            classify_phase(&plain(0.3, 0.3, 0.0, 0.0, 0.1)),
            ProgramPhase::Other
        );
    }

    #[test]
    fn io_precedes_cpu_when_both_hold() {
        assert_eq!(
            classify_phase(&plain(0.3, 0.3, 0.3, 0.3, 0.0)),
            ProgramPhase::IOBound
        );
    }

    #[test]
    fn cpu_bound_and_other() {
        assert_eq!(
            classify_phase(&plain(0.0, 0.0, 0.4, 0.2, 0.0)),
            ProgramPhase::CPUBound
        );
        // 0.5 is not > 0.5
        assert_eq!(
            classify_phase(&plain(0.25, 0.25, 0.25, 0.25, 0.0)),
            ProgramPhase::Other
        );
    }
}
