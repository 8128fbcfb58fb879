//! What a run produces: a per-checkpoint log, its totals, and a small
//! summary document that can be written to disk and compared across runs.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::model::State;
use crate::trace::TraceSet;
use crate::{Error, Result};

/// The two objectives a run can be scored on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Time,
    Energy,
}

impl Metric {
    /// The record column this metric reads.
    pub fn of_segment(&self, time_s: f64, energy_j: f64) -> f64 {
        match self {
            Metric::Time => time_s,
            Metric::Energy => energy_j,
        }
    }

    /// The switch penalty in this metric's dimension.
    pub fn penalty(&self, params: &crate::sim::SimParams) -> f64 {
        match self {
            Metric::Time => params.switch_time_s,
            Metric::Energy => params.switch_energy_j,
        }
    }

    /// The matching total of a finished run.
    pub fn total(&self, result: &RunResult) -> f64 {
        match self {
            Metric::Time => result.total_time_s,
            Metric::Energy => result.total_energy_j,
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Time => "time",
            Metric::Energy => "energy",
        })
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Metric> {
        match s {
            "time" => Ok(Metric::Time),
            "energy" => Ok(Metric::Energy),
            other => Err(Error::Invalid(format!(
                "unknown metric {other:?} (expected \"time\" or \"energy\")"
            ))),
        }
    }
}

/// One checkpoint of a finished run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogRow {
    pub segment: usize,
    /// Pre-decision state shown to the policy.
    pub state: State,
    /// What the policy asked for.
    pub requested: usize,
    /// What the machine ended up on (availability may veto the request).
    pub adopted: usize,
    /// Whether a penalty was charged at this checkpoint.
    pub switched: bool,
    /// Time the adopted configuration needed for the segment, excluding
    /// any switch penalty.
    pub time_s: f64,
    pub energy_j: f64,
    pub penalty_time_s: f64,
    pub penalty_energy_j: f64,
    pub instructions: u64,
    /// Reward of the adopted record (penalties are not part of it).
    pub reward: f64,
}

/// A finished run: the log plus its totals. Totals include switch
/// penalties; `total_instructions` does not depend on the policy because
/// every configuration retires the same program.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub policy: String,
    pub seed: u64,
    pub total_time_s: f64,
    pub total_energy_j: f64,
    pub total_instructions: u64,
    pub log: Vec<LogRow>,
}

impl RunResult {
    pub fn from_log(policy: impl Into<String>, seed: u64, log: Vec<LogRow>) -> RunResult {
        let total_time_s = log.iter().map(|r| r.time_s + r.penalty_time_s).sum();
        let total_energy_j = log.iter().map(|r| r.energy_j + r.penalty_energy_j).sum();
        let total_instructions = log.iter().map(|r| r.instructions).sum();
        RunResult {
            policy: policy.into(),
            seed,
            total_time_s,
            total_energy_j,
            total_instructions,
            log,
        }
    }

    /// Adopted configuration id at each checkpoint.
    pub fn adopted_sequence(&self) -> Vec<usize> {
        self.log.iter().map(|r| r.adopted).collect()
    }

    /// The log as CSV, one line per checkpoint plus a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "seg,config,phase,hw_phase,requested,adopted,switched,\
             time_s,energy_j,penalty_time_s,penalty_energy_j,instr,reward\n",
        );
        for row in &self.log {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                row.segment,
                row.state.config.id,
                row.state.prog_phase.name(),
                row.state.hw_phase.index(),
                row.requested,
                row.adopted,
                row.switched,
                row.time_s,
                row.energy_j,
                row.penalty_time_s,
                row.penalty_energy_j,
                row.instructions,
                row.reward,
            ));
        }
        out
    }

    /// Summary document for this run over the given trace set.
    pub fn summary(&self, ts: &TraceSet) -> Result<RunSummary> {
        Ok(RunSummary {
            schema: RUN_SCHEMA.to_string(),
            format_version: RUN_FORMAT_VERSION,
            policy: self.policy.clone(),
            seed: self.seed,
            benchmark: ts.manifest().benchmark.clone(),
            manifest_sha256: ts.manifest().sha256_hex()?,
            k: ts.k(),
            total_time_s: self.total_time_s,
            total_energy_j: self.total_energy_j,
            total_instructions: self.total_instructions,
        })
    }
}

pub const RUN_SCHEMA: &str = "astro-run";
pub const RUN_FORMAT_VERSION: u32 = 1;

/// The totals of one run, standalone on disk. `manifest_sha256` ties the
/// summary to the exact trace set it ran on, so comparisons across
/// different workloads can be rejected instead of silently producing
/// nonsense ratios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub schema: String,
    pub format_version: u32,
    pub policy: String,
    pub seed: u64,
    pub benchmark: String,
    pub manifest_sha256: String,
    pub k: usize,
    pub total_time_s: f64,
    pub total_energy_j: f64,
    pub total_instructions: u64,
}

impl RunSummary {
    pub fn validate(&self) -> Result<()> {
        if self.schema != RUN_SCHEMA {
            return Err(Error::Invalid(format!(
                "not a run summary (schema {:?})",
                self.schema
            )));
        }
        if self.format_version != RUN_FORMAT_VERSION {
            return Err(Error::Invalid(format!(
                "unsupported run summary version {}",
                self.format_version
            )));
        }
        Ok(())
    }

    pub fn read_json(path: &Path) -> Result<RunSummary> {
        let text = std::fs::read_to_string(path)?;
        let summary: RunSummary = serde_json::from_str(&text)?;
        summary.validate()?;
        Ok(summary)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }
}
