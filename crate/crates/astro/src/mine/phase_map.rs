//! Phase map document: per-function phase labels plus the list of points a
//! runtime would instrument to observe phase transitions.

use std::collections::BTreeMap;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{classify_phase, extract_features, FeatureVector, Program};
use crate::model::ProgramPhase;
use crate::{Error, Result};

pub const PHASE_MAP_FORMAT_VERSION: u32 = 1;

/// One mined function: its classified phase and the features behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseEntry {
    pub phase: ProgramPhase,
    pub features: FeatureVector,
}

/// A location where phase-tracking probes would be inserted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InstrumentationPoint {
    /// Fires when `function` is entered; the active phase becomes its label.
    FunctionEntry { function: String },
    /// Brackets the `index`-th blocking call (0-based, in source order)
    /// inside `function`; the span between the probes is Blocked.
    AroundCall {
        function: String,
        call: String,
        index: u32,
    },
}

/// The mined output of a program: functions in name order plus probe sites.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseMap {
    pub format_version: u32,
    pub functions: BTreeMap<String, PhaseEntry>,
    pub instrumentation: Vec<InstrumentationPoint>,
}

impl PhaseMap {
    pub fn read_json(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Ok(serde_json::from_reader(BufReader::new(file))?)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        let mut writer = BufWriter::new(file);
        serde_json::to_writer_pretty(&mut writer, self)?;
        use std::io::Write as _;
        writeln!(writer)?;
        Ok(())
    }
}

/// Mines a parsed program into its phase map.
///
/// Every function gets an entry-probe point; every blocking call inside a
/// function additionally gets an around-call pair so time spent waiting is
/// attributed to the Blocked phase no matter which function it occurs in.
pub fn build_phase_map(program: &Program) -> Result<PhaseMap> {
    let mut functions = BTreeMap::new();
    let mut instrumentation = Vec::new();
    for func in &program.functions {
        let summary = func.summarize();
        let features = extract_features(&summary)?;
        let phase = classify_phase(&features);
        let previous = functions.insert(func.name.clone(), PhaseEntry { phase, features });
        if previous.is_some() {
            return Err(Error::DuplicateFunction(func.name.clone()));
        }
        instrumentation.push(InstrumentationPoint::FunctionEntry {
            function: func.name.clone(),
        });
        for (index, blocking) in summary.blocking_calls.iter().enumerate() {
            instrumentation.push(InstrumentationPoint::AroundCall {
                function: func.name.clone(),
                call: blocking.target.clone(),
                index: index as u32,
            });
        }
    }
    Ok(PhaseMap {
        format_version: PHASE_MAP_FORMAT_VERSION,
        functions,
        instrumentation,
    })
}
