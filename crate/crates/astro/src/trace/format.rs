//! On-disk trace-set format: `manifest.json` plus one JSON-Lines file per
//! configuration (`config_<id>.jsonl`), one checkpoint record per line.
//!
//! Records are written in canonical form — compact JSON with shortest
//! round-tripping decimal floats — so identical sets are byte-identical on
//! disk and a read is the exact inverse of a write.

use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::model::{CounterReading, ProgramPhase, Topology};
use crate::{Error, Result};

pub const TRACE_FORMAT_VERSION: u32 = 1;

/// Set-level metadata stored in `manifest.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub benchmark: String,
    #[serde(rename = "B")]
    pub n_big: u8,
    #[serde(rename = "L")]
    pub n_little: u8,
    /// Number of progress segments per trace.
    #[serde(rename = "K")]
    pub k: usize,
    /// Nominal checkpoint period; informational (simulated time is driven
    /// by the per-record `time_s`).
    pub period_s: f64,
    /// Generator seed, present on synthetic sets.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub format_version: u32,
}

impl Manifest {
    /// The exact bytes `write_trace_set` stores in `manifest.json`:
    /// pretty-printed JSON plus a trailing newline.
    pub fn canonical_bytes(&self) -> Result<Vec<u8>> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text.into_bytes())
    }

    /// SHA-256 of [`Manifest::canonical_bytes`], lowercase hex. Run
    /// summaries carry this digest so results produced from different
    /// trace sets are never compared against each other by accident.
    pub fn sha256_hex(&self) -> Result<String> {
        use sha2::{Digest, Sha256};
        let digest = Sha256::digest(self.canonical_bytes()?);
        Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
    }
}

/// What one configuration did over one progress segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointRecord {
    #[serde(rename = "seg")]
    pub segment: usize,
    /// Seconds this configuration needs to complete the segment.
    pub time_s: f64,
    pub energy_j: f64,
    #[serde(rename = "instr")]
    pub instructions: u64,
    #[serde(flatten)]
    pub counters: CounterReading,
    #[serde(rename = "phase")]
    pub prog_phase: ProgramPhase,
}

impl CheckpointRecord {
    fn validate(&self) -> Result<()> {
        if !(self.time_s.is_finite() && self.time_s > 0.0) {
            return Err(Error::Trace(format!(
                "segment {}: non-positive time {}",
                self.segment, self.time_s
            )));
        }
        if !(self.energy_j.is_finite() && self.energy_j >= 0.0) {
            return Err(Error::Trace(format!(
                "segment {}: negative energy {}",
                self.segment, self.energy_j
            )));
        }
        if self.instructions == 0 {
            return Err(Error::Trace(format!(
                "segment {}: zero instructions",
                self.segment
            )));
        }
        self.counters.validate()?;
        Ok(())
    }
}

/// One trace per hardware configuration, aligned by equal-progress
/// segments: record `i` of every trace covers the same slice of program
/// work, so a policy choosing configuration `c` at checkpoint `i` spends
/// what trace `c` recorded for segment `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceSet {
    manifest: Manifest,
    topology: Topology,
    /// Indexed by config id; each inner vector has exactly `manifest.k`
    /// records in segment order.
    traces: Vec<Vec<CheckpointRecord>>,
}

impl TraceSet {
    /// Assembles and fully validates a set.
    pub fn new(manifest: Manifest, traces: Vec<Vec<CheckpointRecord>>) -> Result<TraceSet> {
        if manifest.format_version != TRACE_FORMAT_VERSION {
            return Err(Error::Trace(format!(
                "unsupported trace format version {}",
                manifest.format_version
            )));
        }
        if !(manifest.period_s.is_finite() && manifest.period_s > 0.0) {
            return Err(Error::Trace(format!(
                "non-positive checkpoint period {}",
                manifest.period_s
            )));
        }
        if manifest.k == 0 {
            return Err(Error::Trace("a trace set needs at least one segment".into()));
        }
        let topology = Topology::new(u32::from(manifest.n_big), u32::from(manifest.n_little))?;
        if traces.len() != topology.n_configs() {
            return Err(Error::Trace(format!(
                "expected {} traces, got {}",
                topology.n_configs(),
                traces.len()
            )));
        }
        for (id, trace) in traces.iter().enumerate() {
            if trace.len() != manifest.k {
                return Err(Error::Trace(format!(
                    "config {id}: {} records, manifest says K={}",
                    trace.len(),
                    manifest.k
                )));
            }
            for (i, record) in trace.iter().enumerate() {
                if record.segment != i {
                    return Err(Error::Trace(format!(
                        "config {id}: record {i} carries segment index {}",
                        record.segment
                    )));
                }
                record
                    .validate()
                    .map_err(|e| Error::Trace(format!("config {id}: {e}")))?;
            }
        }
        // phases are a property of program progress, not of the config
        for seg in 0..manifest.k {
            let phase = traces[0][seg].prog_phase;
            for (id, trace) in traces.iter().enumerate() {
                if trace[seg].prog_phase != phase {
                    return Err(Error::Trace(format!(
                        "segment {seg}: config 0 says {phase}, config {id} says {}",
                        trace[seg].prog_phase
                    )));
                }
            }
        }
        Ok(TraceSet {
            manifest,
            topology,
            traces,
        })
    }

    pub fn manifest(&self) -> &Manifest {
        &self.manifest
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn n_configs(&self) -> usize {
        self.topology.n_configs()
    }

    pub fn k(&self) -> usize {
        self.manifest.k
    }

    /// Records of one configuration, in segment order.
    pub fn records(&self, config_id: usize) -> Result<&[CheckpointRecord]> {
        self.traces
            .get(config_id)
            .map(Vec::as_slice)
            .ok_or(Error::InvalidConfigId {
                id: config_id,
                count: self.n_configs(),
            })
    }

    /// The program phase of each segment (identical across configurations).
    pub fn phases(&self) -> Vec<ProgramPhase> {
        self.traces[0].iter().map(|r| r.prog_phase).collect()
    }

    pub fn n_records(&self) -> usize {
        self.traces.iter().map(Vec::len).sum()
    }
}

fn config_file_name(id: usize) -> String {
    format!("config_{id}.jsonl")
}

/// Reads only the manifest of a trace set directory.
pub fn read_manifest(path: &Path) -> Result<Manifest> {
    let manifest_path = path.join("manifest.json");
    let manifest_text = std::fs::read_to_string(&manifest_path)
        .map_err(|e| Error::Trace(format!("{}: {e}", manifest_path.display())))?;
    Ok(serde_json::from_str(&manifest_text)?)
}

/// Reads and validates a trace set from a directory.
pub fn read_trace_set(path: &Path) -> Result<TraceSet> {
    let manifest = read_manifest(path)?;
    let topology = Topology::new(u32::from(manifest.n_big), u32::from(manifest.n_little))?;

    let mut traces = Vec::with_capacity(topology.n_configs());
    for id in 0..topology.n_configs() {
        let file_path = path.join(config_file_name(id));
        let file = std::fs::File::open(&file_path).map_err(|_| Error::MissingConfig(id))?;
        let mut records = Vec::with_capacity(manifest.k);
        for (lineno, line) in BufReader::new(file).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let record: CheckpointRecord =
                serde_json::from_str(&line).map_err(|e| Error::Parse {
                    line: lineno + 1,
                    message: format!("{}: {e}", file_path.display()),
                })?;
            records.push(record);
        }
        traces.push(records);
    }
    TraceSet::new(manifest, traces)
}

/// Writes a trace set to a directory so that reading it back is the
/// identity. Refuses to touch an existing directory unless `overwrite`.
pub fn write_trace_set(ts: &TraceSet, path: &Path, overwrite: bool) -> Result<()> {
    if path.exists() && !overwrite {
        return Err(Error::Trace(format!(
            "{} already exists (pass overwrite to replace it)",
            path.display()
        )));
    }
    std::fs::create_dir_all(path)?;
    std::fs::write(path.join("manifest.json"), ts.manifest.canonical_bytes()?)?;
    for (id, trace) in ts.traces.iter().enumerate() {
        let file = std::fs::File::create(path.join(config_file_name(id)))?;
        let mut writer = BufWriter::new(file);
        for record in trace {
            serde_json::to_writer(&mut writer, record)?;
            writer.write_all(b"\n")?;
        }
        writer.flush()?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::{generate_synthetic, SyntheticSpec};

    fn small_spec() -> SyntheticSpec {
        SyntheticSpec {
            n_big: 2,
            n_little: 1,
            k: 4,
            seed: 9,
            ..SyntheticSpec::default()
        }
    }

    #[test]
    fn round_trip_is_identity() {
        let ts = generate_synthetic(&small_spec()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("set");
        write_trace_set(&ts, &path, false).unwrap();
        let back = read_trace_set(&path).unwrap();
        assert_eq!(back, ts);
    }

    #[test]
    fn manifest_uses_documented_keys() {
        let ts = generate_synthetic(&small_spec()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("set");
        write_trace_set(&ts, &path, false).unwrap();
        let text = std::fs::read_to_string(path.join("manifest.json")).unwrap();
        for key in ["\"benchmark\"", "\"B\"", "\"L\"", "\"K\"", "\"period_s\"", "\"seed\"", "\"format_version\""] {
            assert!(text.contains(key), "manifest missing {key}: {text}");
        }
        let line = std::fs::read_to_string(path.join("config_0.jsonl")).unwrap();
        let first = line.lines().next().unwrap();
        for key in ["\"seg\"", "\"time_s\"", "\"energy_j\"", "\"instr\"", "\"ipc\"", "\"cma\"", "\"cmi\"", "\"cpu\"", "\"phase\""] {
            assert!(first.contains(key), "record missing {key}: {first}");
        }
    }

    #[test]
    fn overwrite_requires_flag() {
        let ts = generate_synthetic(&small_spec()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("set");
        write_trace_set(&ts, &path, false).unwrap();
        let err = write_trace_set(&ts, &path, false).unwrap_err();
        assert!(err.to_string().contains("already exists"));
        write_trace_set(&ts, &path, true).unwrap();
        assert_eq!(read_trace_set(&path).unwrap(), ts);
    }

    #[test]
    fn twenty_four_configs_times_ten_segments() {
        let spec = SyntheticSpec {
            n_big: 4,
            n_little: 4,
            k: 10,
            seed: 42,
            ..SyntheticSpec::default()
        };
        let ts = generate_synthetic(&spec).unwrap();
        assert_eq!(ts.n_configs(), 24);
        assert_eq!(ts.n_records(), 240);
    }

    #[test]
    fn missing_config_file_is_named() {
        let ts = generate_synthetic(&small_spec()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("set");
        write_trace_set(&ts, &path, false).unwrap();
        std::fs::remove_file(path.join("config_3.jsonl")).unwrap();
        match read_trace_set(&path) {
            Err(Error::MissingConfig(3)) => {}
            other => panic!("expected missing-config error, got {other:?}"),
        }
    }

    #[test]
    fn phase_disagreement_is_rejected() {
        let ts = generate_synthetic(&small_spec()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("set");
        write_trace_set(&ts, &path, false).unwrap();
        // flip the phase of config 1, segment 0 only
        let f = path.join("config_1.jsonl");
        let text = std::fs::read_to_string(&f).unwrap();
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        lines[0] = lines[0].replace("\"CPUBound\"", "\"Other\"");
        std::fs::write(&f, lines.join("\n") + "\n").unwrap();
        let err = read_trace_set(&path).unwrap_err();
        assert!(err.to_string().contains("segment 0"), "{err}");
    }

    #[test]
    fn short_trace_is_rejected() {
        let ts = generate_synthetic(&small_spec()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("set");
        write_trace_set(&ts, &path, false).unwrap();
        let f = path.join("config_2.jsonl");
        let text = std::fs::read_to_string(&f).unwrap();
        let shorter: Vec<&str> = text.lines().take(3).collect();
        std::fs::write(&f, shorter.join("\n") + "\n").unwrap();
        let err = read_trace_set(&path).unwrap_err();
        assert!(err.to_string().contains("manifest says K=4"), "{err}");
    }

    #[test]
    fn malformed_record_reports_the_line() {
        let ts = generate_synthetic(&small_spec()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("set");
        write_trace_set(&ts, &path, false).unwrap();
        let f = path.join("config_0.jsonl");
        let mut text = std::fs::read_to_string(&f).unwrap();
        text.push_str("{not json\n");
        std::fs::write(&f, text).unwrap();
        match read_trace_set(&path) {
            Err(e @ Error::Parse { .. }) => assert_eq!(e.parse_line(), Some(5)),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn validation_rejects_bad_records() {
        let ts = generate_synthetic(&small_spec()).unwrap();
        let manifest = ts.manifest().clone();
        let mut traces: Vec<Vec<CheckpointRecord>> = (0..ts.n_configs())
            .map(|id| ts.records(id).unwrap().to_vec())
            .collect();
        traces[1][2].time_s = 0.0;
        let err = TraceSet::new(manifest, traces).unwrap_err();
        assert!(err.to_string().contains("non-positive time"), "{err}");
    }
}
