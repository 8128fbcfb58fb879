//! Synthetic trace-set generator.
//!
//! Real sets would be recorded on hardware, one run per configuration. The
//! generator replaces them with a deterministic model: per program phase it
//! takes base costs for a hypothetical zero-core reference and scales them
//! with the active core counts `nb` (big) and `nl` (LITTLE) of each
//! configuration:
//!
//! ```text
//! time(nb, nl)   = time_s   / ((1 + nb)^big_exp · (1 + nl)^little_exp)
//! energy(nb, nl) = energy_j · (1 + eb·nb + el·nl)
//! ```
//!
//! The energy slopes `(eb, el)` are fixed per phase kind (see
//! [`energy_slopes`]); the time exponents are configurable per phase and
//! default to core-sensitive values for CPUBound/Other and zero (core
//! insensitivity) for IOBound/Blocked. Optional multiplicative noise
//! `1 + noise·U(−1, 1)` jitters every generated quantity.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::format::{CheckpointRecord, Manifest, TraceSet, TRACE_FORMAT_VERSION};
use crate::model::{CounterReading, ProgramPhase, Topology};
use crate::{Error, Result};

/// Cost model of one program phase: base values for the reference
/// configuration plus the time-scaling exponents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PhaseModel {
    pub time_s: f64,
    pub energy_j: f64,
    pub instructions: u64,
    pub big_exp: f64,
    pub little_exp: f64,
}

impl Default for PhaseModel {
    fn default() -> Self {
        PhaseModel {
            time_s: 0.5,
            energy_j: 1.0,
            instructions: 1_000_000,
            big_exp: 0.0,
            little_exp: 0.0,
        }
    }
}

impl PhaseModel {
    fn validate(&self, phase: ProgramPhase) -> Result<()> {
        let ok = self.time_s.is_finite()
            && self.time_s > 0.0
            && self.energy_j.is_finite()
            && self.energy_j >= 0.0
            && self.instructions > 0
            && self.big_exp.is_finite()
            && self.big_exp >= 0.0
            && self.little_exp.is_finite()
            && self.little_exp >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Invalid(format!("bad {phase} model: {self:?}")))
        }
    }
}

/// One cost model per program phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PhaseModels {
    pub cpu_bound: PhaseModel,
    pub io_bound: PhaseModel,
    pub blocked: PhaseModel,
    pub other: PhaseModel,
}

impl Default for PhaseModels {
    fn default() -> Self {
        PhaseModels {
            cpu_bound: PhaseModel {
                time_s: 0.5,
                energy_j: 1.0,
                instructions: 1_200_000,
                big_exp: 0.8,
                little_exp: 0.3,
            },
            io_bound: PhaseModel {
                time_s: 0.5,
                energy_j: 0.6,
                instructions: 400_000,
                big_exp: 0.0,
                little_exp: 0.0,
            },
            blocked: PhaseModel {
                time_s: 0.5,
                energy_j: 0.25,
                instructions: 80_000,
                big_exp: 0.0,
                little_exp: 0.0,
            },
            other: PhaseModel {
                time_s: 0.5,
                energy_j: 0.8,
                instructions: 700_000,
                big_exp: 0.4,
                little_exp: 0.15,
            },
        }
    }
}

impl PhaseModels {
    pub fn for_phase(&self, phase: ProgramPhase) -> &PhaseModel {
        match phase {
            ProgramPhase::Blocked => &self.blocked,
            ProgramPhase::IOBound => &self.io_bound,
            ProgramPhase::CPUBound => &self.cpu_bound,
            ProgramPhase::Other => &self.other,
        }
    }
}

/// Per-phase energy slopes `(eb, el)`: how strongly energy grows with each
/// extra big / LITTLE core. Busy phases pay more for extra silicon.
pub fn energy_slopes(phase: ProgramPhase) -> (f64, f64) {
    match phase {
        ProgramPhase::Blocked => (0.02, 0.01),
        ProgramPhase::IOBound => (0.05, 0.02),
        ProgramPhase::CPUBound => (0.35, 0.10),
        ProgramPhase::Other => (0.20, 0.06),
    }
}

/// Noise-free counter readings per phase, chosen to land in distinct
/// hardware-phase buckets.
pub fn counter_bases(phase: ProgramPhase) -> CounterReading {
    let (ipc, cma, cmi, cpu) = match phase {
        ProgramPhase::Blocked => (0.08, 0.02, 0.002, 0.08),
        ProgramPhase::IOBound => (0.35, 0.03, 0.003, 0.35),
        ProgramPhase::CPUBound => (1.3, 0.004, 0.0003, 0.95),
        ProgramPhase::Other => (0.7, 0.008, 0.0008, 0.45),
    };
    CounterReading {
        ipc,
        cma,
        cmi,
        cpu,
    }
}

/// One phase-script entry: segments `from..=to` run in `phase`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseRange {
    pub from: usize,
    pub to: usize,
    pub phase: ProgramPhase,
}

/// Everything the generator needs; serializable so a spec file fully
/// reproduces a set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticSpec {
    pub benchmark: String,
    pub n_big: u8,
    pub n_little: u8,
    /// Number of progress segments.
    pub k: usize,
    pub period_s: f64,
    pub seed: u64,
    /// Multiplicative noise level in [0, 0.5]: every quantity is scaled by
    /// `1 + noise·U(−1, 1)`.
    pub noise: f64,
    /// When set, instruction counts get per-configuration jitter instead of
    /// being identical across configurations at equal segment.
    pub per_config_instructions: bool,
    /// Phase script covering segments 0..K−1 exactly once. An empty script
    /// means every segment is CPUBound.
    pub phases: Vec<PhaseRange>,
    pub models: PhaseModels,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            benchmark: "synthetic".to_string(),
            n_big: 4,
            n_little: 4,
            k: 20,
            period_s: 0.5,
            seed: 42,
            noise: 0.05,
            per_config_instructions: false,
            phases: Vec::new(),
            models: PhaseModels::default(),
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        Topology::new(u32::from(self.n_big), u32::from(self.n_little))?;
        if self.k == 0 {
            return Err(Error::Invalid("K must be at least 1".into()));
        }
        if !(self.period_s.is_finite() && self.period_s > 0.0) {
            return Err(Error::Invalid(format!("bad period {}", self.period_s)));
        }
        if !(0.0..=0.5).contains(&self.noise) {
            return Err(Error::Invalid(format!(
                "noise {} outside [0, 0.5]",
                self.noise
            )));
        }
        for phase in ProgramPhase::ALL {
            self.models.for_phase(phase).validate(phase)?;
        }
        self.segment_phases()?;
        Ok(())
    }

    /// Expands the phase script into one phase per segment.
    pub fn segment_phases(&self) -> Result<Vec<ProgramPhase>> {
        if self.phases.is_empty() {
            return Ok(vec![ProgramPhase::CPUBound; self.k]);
        }
        let mut ranges = self.phases.clone();
        ranges.sort_by_key(|r| (r.from, r.to));
        let mut out = Vec::with_capacity(self.k);
        let mut expect = 0usize;
        for r in &ranges {
            if r.to < r.from {
                return Err(Error::PhaseScript(format!(
                    "empty range {}..{}",
                    r.from, r.to
                )));
            }
            if r.from != expect {
                return Err(Error::PhaseScript(format!(
                    "expected a range starting at segment {expect}, found {}..{} \
                     (script must cover 0..{} exactly once)",
                    r.from,
                    r.to,
                    self.k - 1
                )));
            }
            if r.to >= self.k {
                return Err(Error::PhaseScript(format!(
                    "range {}..{} runs past the last segment {}",
                    r.from,
                    r.to,
                    self.k - 1
                )));
            }
            out.extend(std::iter::repeat_n(r.phase, r.to - r.from + 1));
            expect = r.to + 1;
        }
        if expect != self.k {
            return Err(Error::PhaseScript(format!(
                "segments {expect}..{} uncovered",
                self.k - 1
            )));
        }
        Ok(out)
    }

    pub fn read_json(path: &std::path::Path) -> Result<SyntheticSpec> {
        let spec: SyntheticSpec = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn write_json(&self, path: &std::path::Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }
}

fn jitter<R: Rng + ?Sized>(rng: &mut R, noise: f64, base: f64) -> f64 {
    base * (1.0 + noise * rng.random_range(-1.0..1.0))
}

/// Generates the trace set described by `spec`; deterministic in the seed.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<TraceSet> {
    spec.validate()?;
    let topo = Topology::new(u32::from(spec.n_big), u32::from(spec.n_little))?;
    let phases = spec.segment_phases()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let mut traces = Vec::with_capacity(topo.n_configs());
    for config in topo.configs() {
        let nb = f64::from(config.n_big);
        let nl = f64::from(config.n_little);
        let mut records = Vec::with_capacity(spec.k);
        for (seg, &phase) in phases.iter().enumerate() {
            let m = spec.models.for_phase(phase);
            let scale = (1.0 + nb).powf(m.big_exp) * (1.0 + nl).powf(m.little_exp);
            let (eb, el) = energy_slopes(phase);
            let base = counter_bases(phase);

            let time_s = jitter(&mut rng, spec.noise, m.time_s / scale);
            let energy_j = jitter(&mut rng, spec.noise, m.energy_j * (1.0 + eb * nb + el * nl));
            let counters = CounterReading::new(
                jitter(&mut rng, spec.noise, base.ipc),
                jitter(&mut rng, spec.noise, base.cma),
                jitter(&mut rng, spec.noise, base.cmi),
                jitter(&mut rng, spec.noise, base.cpu).min(1.0),
            )?;
            let instr_jitter = jitter(&mut rng, spec.noise, m.instructions as f64);
            let instructions = if spec.per_config_instructions {
                instr_jitter.round().max(1.0) as u64
            } else {
                m.instructions
            };
            records.push(CheckpointRecord {
                segment: seg,
                time_s,
                energy_j,
                instructions,
                counters,
                prog_phase: phase,
            });
        }
        traces.push(records);
    }

    let manifest = Manifest {
        benchmark: spec.benchmark.clone(),
        n_big: spec.n_big,
        n_little: spec.n_little,
        k: spec.k,
        period_s: spec.period_s,
        seed: Some(spec.seed),
        format_version: TRACE_FORMAT_VERSION,
    };
    TraceSet::new(manifest, traces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::write_trace_set;

    #[test]
    fn deterministic_in_the_seed() {
        let spec = SyntheticSpec {
            n_big: 4,
            n_little: 4,
            k: 10,
            seed: 42,
            ..SyntheticSpec::default()
        };
        let a = generate_synthetic(&spec).unwrap();
        let b = generate_synthetic(&spec).unwrap();
        assert_eq!(a, b);

        // byte-identical on disk, too
        let dir = tempfile::tempdir().unwrap();
        write_trace_set(&a, &dir.path().join("a"), false).unwrap();
        write_trace_set(&b, &dir.path().join("b"), false).unwrap();
        for name in ["manifest.json", "config_0.jsonl", "config_23.jsonl"] {
            let fa = std::fs::read(dir.path().join("a").join(name)).unwrap();
            let fb = std::fs::read(dir.path().join("b").join(name)).unwrap();
            assert_eq!(fa, fb, "{name} differs");
        }

        let other_seed = SyntheticSpec { seed: 43, ..spec };
        assert_ne!(generate_synthetic(&other_seed).unwrap(), a);
    }

    #[test]
    fn zero_noise_matches_the_closed_form() {
        let spec = SyntheticSpec {
            n_big: 4,
            n_little: 2,
            k: 3,
            noise: 0.0,
            ..SyntheticSpec::default()
        };
        let ts = generate_synthetic(&spec).unwrap();
        let m = spec.models.cpu_bound;
        for config in ts.topology().configs() {
            let nb = f64::from(config.n_big);
            let nl = f64::from(config.n_little);
            let expected_t = m.time_s / ((1.0 + nb).powf(m.big_exp) * (1.0 + nl).powf(m.little_exp));
            let expected_e = m.energy_j * (1.0 + 0.35 * nb + 0.10 * nl);
            for r in ts.records(config.id).unwrap() {
                assert_eq!(r.time_s, expected_t);
                assert_eq!(r.energy_j, expected_e);
                assert_eq!(r.instructions, m.instructions);
            }
        }
    }

    #[test]
    fn cpu_time_strictly_drops_with_big_cores() {
        let spec = SyntheticSpec {
            n_big: 4,
            n_little: 2,
            k: 2,
            noise: 0.0,
            ..SyntheticSpec::default()
        };
        let ts = generate_synthetic(&spec).unwrap();
        let topo = ts.topology().clone();
        for nl in 0..=2u8 {
            let mut last_time = f64::INFINITY;
            let mut last_energy = 0.0;
            for nb in 0..=4u8 {
                if nb == 0 && nl == 0 {
                    continue;
                }
                let id = topo
                    .configs()
                    .into_iter()
                    .find(|c| c.n_big == u32::from(nb) && c.n_little == u32::from(nl))
                    .unwrap()
                    .id;
                let r = &ts.records(id).unwrap()[0];
                assert!(r.time_s < last_time, "time not dropping at {nb}B {nl}L");
                assert!(r.energy_j > last_energy, "energy not rising at {nb}B {nl}L");
                last_time = r.time_s;
                last_energy = r.energy_j;
            }
        }
    }

    #[test]
    fn io_bound_time_is_core_count_insensitive() {
        let spec = SyntheticSpec {
            n_big: 3,
            n_little: 3,
            k: 2,
            noise: 0.0,
            phases: vec![PhaseRange {
                from: 0,
                to: 1,
                phase: ProgramPhase::IOBound,
            }],
            ..SyntheticSpec::default()
        };
        let ts = generate_synthetic(&spec).unwrap();
        let t0 = ts.records(0).unwrap()[0].time_s;
        for id in 0..ts.n_configs() {
            assert_eq!(ts.records(id).unwrap()[0].time_s, t0);
        }
    }

    #[test]
    fn phase_script_lands_in_records() {
        let spec = SyntheticSpec {
            k: 4,
            phases: vec![
                PhaseRange { from: 2, to: 3, phase: ProgramPhase::IOBound },
                PhaseRange { from: 0, to: 1, phase: ProgramPhase::Blocked },
            ],
            ..SyntheticSpec::default()
        };
        let ts = generate_synthetic(&spec).unwrap();
        assert_eq!(
            ts.phases(),
            vec![
                ProgramPhase::Blocked,
                ProgramPhase::Blocked,
                ProgramPhase::IOBound,
                ProgramPhase::IOBound
            ]
        );
    }

    #[test]
    fn phase_script_gaps_and_overlaps_rejected() {
        let gap = SyntheticSpec {
            k: 10,
            phases: vec![
                PhaseRange { from: 0, to: 4, phase: ProgramPhase::CPUBound },
                PhaseRange { from: 6, to: 9, phase: ProgramPhase::Other },
            ],
            ..SyntheticSpec::default()
        };
        assert!(matches!(gap.validate(), Err(Error::PhaseScript(_))));

        let overlap = SyntheticSpec {
            k: 10,
            phases: vec![
                PhaseRange { from: 0, to: 5, phase: ProgramPhase::CPUBound },
                PhaseRange { from: 5, to: 9, phase: ProgramPhase::Other },
            ],
            ..SyntheticSpec::default()
        };
        assert!(matches!(overlap.validate(), Err(Error::PhaseScript(_))));

        let truncated = SyntheticSpec {
            k: 10,
            phases: vec![PhaseRange { from: 0, to: 8, phase: ProgramPhase::CPUBound }],
            ..SyntheticSpec::default()
        };
        assert!(matches!(truncated.validate(), Err(Error::PhaseScript(_))));

        let past_end = SyntheticSpec {
            k: 10,
            phases: vec![PhaseRange { from: 0, to: 10, phase: ProgramPhase::CPUBound }],
            ..SyntheticSpec::default()
        };
        assert!(matches!(past_end.validate(), Err(Error::PhaseScript(_))));
    }

    #[test]
    fn noise_level_is_bounded() {
        let spec = SyntheticSpec {
            noise: 0.6,
            ..SyntheticSpec::default()
        };
        assert!(spec.validate().is_err());
    }

    #[test]
    fn max_noise_still_yields_valid_sets() {
        let spec = SyntheticSpec {
            noise: 0.5,
            seed: 7,
            ..SyntheticSpec::default()
        };
        // TraceSet::new validates every record, including counter ranges
        generate_synthetic(&spec).unwrap();
    }

    #[test]
    fn instructions_align_across_configs_by_default() {
        let spec = SyntheticSpec {
            n_big: 2,
            n_little: 2,
            k: 5,
            noise: 0.3,
            seed: 11,
            ..SyntheticSpec::default()
        };
        let ts = generate_synthetic(&spec).unwrap();
        for seg in 0..spec.k {
            let i0 = ts.records(0).unwrap()[seg].instructions;
            for id in 1..ts.n_configs() {
                assert_eq!(ts.records(id).unwrap()[seg].instructions, i0);
            }
        }

        let jittered = SyntheticSpec {
            per_config_instructions: true,
            ..spec
        };
        let ts = generate_synthetic(&jittered).unwrap();
        let differs = (0..ts.n_configs())
            .any(|id| ts.records(id).unwrap()[0].instructions != ts.records(0).unwrap()[0].instructions);
        assert!(differs, "per-config jitter had no effect");
    }

    #[test]
    fn spec_file_round_trips() {
        let spec = SyntheticSpec {
            phases: vec![PhaseRange { from: 0, to: 19, phase: ProgramPhase::Other }],
            ..SyntheticSpec::default()
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("spec.json");
        spec.write_json(&path).unwrap();
        assert_eq!(SyntheticSpec::read_json(&path).unwrap(), spec);

        // partial documents fall back to defaults
        std::fs::write(&path, "{\"k\": 7, \"seed\": 1}").unwrap();
        let partial = SyntheticSpec::read_json(&path).unwrap();
        assert_eq!(partial.k, 7);
        assert_eq!(partial.n_big, 4);
    }
}
