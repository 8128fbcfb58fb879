//! Frozen decision tables extracted from a trained agent, and their replay.
//!
//! A trained agent is a network; shipping one inside a program means
//! shipping an inference engine. A *schedule* is the cheap alternative: the
//! agent's decisions are evaluated once, ahead of time, and written down as
//! a lookup table that a checkpoint can consult in a handful of
//! instructions. Two granularities exist:
//!
//! * [`StaticSchedule`] — one configuration per program phase (4 entries).
//!   The same region of the program always lands on the same configuration.
//! * [`HybridSchedule`] — one configuration per (program phase, hardware
//!   phase) pair (4 × 81 = 324 entries), so the decision can also react to
//!   what the counters currently look like.
//!
//! Neither is guaranteed to beat the other on a given workload; replay both
//! and compare. [`replay_schedule`] runs a table against a trace set with
//! the same switching rules as every other policy, and [`emit_pseudo`]
//! renders a table as a C-like listing for inspection or hand-porting.

mod export;
mod pseudo;
mod replay;

pub use export::{export_hybrid, export_static};
pub use pseudo::emit_pseudo;
pub use replay::replay_schedule;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::model::{
    HardwarePhase, ProgramPhase, Topology, N_HARDWARE_PHASES, N_PROGRAM_PHASES,
};
use crate::{Error, Result};

pub const SCHEDULE_SCHEMA: &str = "astro-schedule";
pub const SCHEDULE_FORMAT_VERSION: u32 = 1;

/// Program phase → configuration id, total over the four phases.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StaticSchedule {
    topology: Topology,
    table: [usize; N_PROGRAM_PHASES],
}

impl StaticSchedule {
    pub fn new(topology: Topology, table: [usize; N_PROGRAM_PHASES]) -> Result<StaticSchedule> {
        for &id in &table {
            topology.config(id)?;
        }
        Ok(StaticSchedule { topology, table })
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    /// Total by construction: every phase has an entry.
    pub fn config_for(&self, phase: ProgramPhase) -> usize {
        self.table[phase.index()]
    }
}

/// (Program phase, hardware phase) → configuration id, total over all
/// 4 × 81 keys.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HybridSchedule {
    topology: Topology,
    /// Flat table, index `phase.index() * 81 + hw_index`.
    table: Vec<usize>,
}

impl HybridSchedule {
    pub fn new(topology: Topology, table: Vec<usize>) -> Result<HybridSchedule> {
        let expected = N_PROGRAM_PHASES * N_HARDWARE_PHASES;
        if table.len() != expected {
            return Err(Error::Invalid(format!(
                "hybrid table has {} entries, needs {expected}",
                table.len()
            )));
        }
        for &id in &table {
            topology.config(id)?;
        }
        Ok(HybridSchedule { topology, table })
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn config_for(&self, phase: ProgramPhase, hw_phase: &HardwarePhase) -> usize {
        self.table[phase.index() * N_HARDWARE_PHASES + hw_phase.index()]
    }
}

/// Either table behind one lookup interface.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Schedule {
    Static(StaticSchedule),
    Hybrid(HybridSchedule),
}

impl From<StaticSchedule> for Schedule {
    fn from(s: StaticSchedule) -> Schedule {
        Schedule::Static(s)
    }
}

impl From<HybridSchedule> for Schedule {
    fn from(s: HybridSchedule) -> Schedule {
        Schedule::Hybrid(s)
    }
}

impl Schedule {
    pub fn kind(&self) -> &'static str {
        match self {
            Schedule::Static(_) => "static",
            Schedule::Hybrid(_) => "hybrid",
        }
    }

    pub fn topology(&self) -> &Topology {
        match self {
            Schedule::Static(s) => s.topology(),
            Schedule::Hybrid(s) => s.topology(),
        }
    }

    /// The configuration the table prescribes. A static table ignores the
    /// hardware phase. Never fails: both tables are total.
    pub fn lookup(&self, phase: ProgramPhase, hw_phase: &HardwarePhase) -> usize {
        match self {
            Schedule::Static(s) => s.config_for(phase),
            Schedule::Hybrid(s) => s.config_for(phase, hw_phase),
        }
    }

    /// Writes the table as pretty-printed JSON. Entries carry the core
    /// counts of their configuration redundantly so the file reads without
    /// decoding ids in one's head; [`Schedule::read_json`] checks them.
    pub fn write_json(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(&self.to_file()?)?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn read_json(path: &Path) -> Result<Schedule> {
        let text = std::fs::read_to_string(path)?;
        let file: ScheduleFile = serde_json::from_str(&text)?;
        Schedule::from_file(file)
    }

    fn to_file(&self) -> Result<ScheduleFile> {
        let topology = *self.topology();
        let mut entries = Vec::new();
        match self {
            Schedule::Static(s) => {
                for phase in ProgramPhase::ALL {
                    entries.push(ScheduleEntry::new(&topology, phase, None, s.config_for(phase))?);
                }
            }
            Schedule::Hybrid(s) => {
                for phase in ProgramPhase::ALL {
                    for hw in 0..N_HARDWARE_PHASES {
                        let id = s.config_for(phase, &HardwarePhase::from_index(hw)?);
                        entries.push(ScheduleEntry::new(&topology, phase, Some(hw), id)?);
                    }
                }
            }
        }
        Ok(ScheduleFile {
            schema: SCHEDULE_SCHEMA.to_string(),
            format_version: SCHEDULE_FORMAT_VERSION,
            kind: self.kind().to_string(),
            n_big: topology.n_big,
            n_little: topology.n_little,
            entries,
        })
    }

    fn from_file(file: ScheduleFile) -> Result<Schedule> {
        if file.schema != SCHEDULE_SCHEMA {
            return Err(Error::Invalid(format!(
                "not a schedule (schema {:?})",
                file.schema
            )));
        }
        if file.format_version != SCHEDULE_FORMAT_VERSION {
            return Err(Error::Invalid(format!(
                "unsupported schedule version {}",
                file.format_version
            )));
        }
        let topology = Topology::new(file.n_big, file.n_little)?;
        match file.kind.as_str() {
            "static" => {
                let mut table = [None; N_PROGRAM_PHASES];
                for entry in &file.entries {
                    entry.check(&topology, false)?;
                    let slot = &mut table[entry.phase.index()];
                    if slot.replace(entry.config).is_some() {
                        return Err(Error::Invalid(format!(
                            "duplicate entry for phase {}",
                            entry.phase.name()
                        )));
                    }
                }
                let mut flat = [0usize; N_PROGRAM_PHASES];
                for (i, slot) in table.iter().enumerate() {
                    flat[i] = slot.ok_or_else(|| {
                        Error::Invalid(format!(
                            "missing entry for phase {}",
                            ProgramPhase::ALL[i].name()
                        ))
                    })?;
                }
                Ok(Schedule::Static(StaticSchedule::new(topology, flat)?))
            }
            "hybrid" => {
                let mut table = vec![None; N_PROGRAM_PHASES * N_HARDWARE_PHASES];
                for entry in &file.entries {
                    entry.check(&topology, true)?;
                    let hw = entry.hw_phase.expect("checked: hybrid entries carry one");
                    let slot = &mut table[entry.phase.index() * N_HARDWARE_PHASES + hw];
                    if slot.replace(entry.config).is_some() {
                        return Err(Error::Invalid(format!(
                            "duplicate entry for phase {} / hardware phase {hw}",
                            entry.phase.name()
                        )));
                    }
                }
                let flat: Vec<usize> = table
                    .iter()
                    .enumerate()
                    .map(|(i, slot)| {
                        slot.ok_or_else(|| {
                            Error::Invalid(format!(
                                "missing entry for phase {} / hardware phase {}",
                                ProgramPhase::ALL[i / N_HARDWARE_PHASES].name(),
                                i % N_HARDWARE_PHASES
                            ))
                        })
                    })
                    .collect::<Result<_>>()?;
                Ok(Schedule::Hybrid(HybridSchedule::new(topology, flat)?))
            }
            other => Err(Error::Invalid(format!("unknown schedule kind {other:?}"))),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct ScheduleFile {
    schema: String,
    format_version: u32,
    kind: String,
    n_big: u32,
    n_little: u32,
    entries: Vec<ScheduleEntry>,
}

/// One table row on disk. `n_big`/`n_little` duplicate what `config`
/// already implies; they are for human readers and are verified on load.
#[derive(Debug, Serialize, Deserialize)]
struct ScheduleEntry {
    phase: ProgramPhase,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    hw_phase: Option<usize>,
    config: usize,
    n_big: u32,
    n_little: u32,
}

impl ScheduleEntry {
    fn new(
        topology: &Topology,
        phase: ProgramPhase,
        hw_phase: Option<usize>,
        config: usize,
    ) -> Result<ScheduleEntry> {
        let hc = topology.config(config)?;
        Ok(ScheduleEntry {
            phase,
            hw_phase,
            config,
            n_big: hc.n_big,
            n_little: hc.n_little,
        })
    }

    fn check(&self, topology: &Topology, hybrid: bool) -> Result<()> {
        if hybrid != self.hw_phase.is_some() {
            return Err(Error::Invalid(format!(
                "phase {} entry does not match the schedule kind",
                self.phase.name()
            )));
        }
        if let Some(hw) = self.hw_phase {
            if hw >= N_HARDWARE_PHASES {
                return Err(Error::Invalid(format!(
                    "hardware phase index {hw} out of range 0..=80"
                )));
            }
        }
        let hc = topology.config(self.config)?;
        if (hc.n_big, hc.n_little) != (self.n_big, self.n_little) {
            return Err(Error::Invalid(format!(
                "entry for phase {} says configuration {} is {}L{}B, but it is {}",
                self.phase.name(),
                self.config,
                self.n_little,
                self.n_big,
                hc.label()
            )));
        }
        Ok(())
    }
}
