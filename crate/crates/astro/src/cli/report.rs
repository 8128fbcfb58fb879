//! Scoring a set of runs against energy/slowdown thresholds.
//!
//! The question a comparison answers: which policies save at least E% of
//! energy against a chosen baseline while slowing the program down by no
//! more than S% against the fastest run in the set? Both percentages are
//! computed from run summaries over the *same* trace set — summaries carry
//! the manifest digest precisely so this precondition is checkable.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::sim::RunSummary;
use crate::{Error, Result};

pub const COMPARE_SCHEMA: &str = "astro-compare";
pub const COMPARE_FORMAT_VERSION: u32 = 1;

/// One policy's standing in a comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub policy: String,
    pub seed: u64,
    pub total_time_s: f64,
    pub total_energy_j: f64,
    /// Percent slower than the fastest run in the set; the fastest row
    /// itself is exactly 0.
    pub slowdown_pct: f64,
    /// Percent of the baseline's energy saved; negative when the policy
    /// spends more than the baseline.
    pub energy_saving_pct: f64,
    /// True iff `energy_saving_pct >= energy_threshold_pct` and
    /// `slowdown_pct <= slowdown_threshold_pct`.
    pub pass: bool,
}

/// A full comparison, serializable as JSON or CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub schema: String,
    pub format_version: u32,
    pub benchmark: String,
    pub manifest_sha256: String,
    /// Policy whose energy anchors the savings percentages.
    pub baseline: String,
    pub energy_threshold_pct: f64,
    pub slowdown_threshold_pct: f64,
    /// Sorted by total time, fastest first (ties: energy, then name).
    pub rows: Vec<CompareRow>,
}

impl CompareReport {
    pub fn validate(&self) -> Result<()> {
        if self.schema != COMPARE_SCHEMA {
            return Err(Error::Invalid(format!(
                "not a comparison report (schema {:?})",
                self.schema
            )));
        }
        if self.format_version != COMPARE_FORMAT_VERSION {
            return Err(Error::Invalid(format!(
                "unsupported comparison report version {}",
                self.format_version
            )));
        }
        Ok(())
    }

    pub fn read_json(path: &Path) -> Result<CompareReport> {
        let report: CompareReport =
            serde_json::from_str(&std::fs::read_to_string(path)?)?;
        report.validate()?;
        Ok(report)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }

    /// The rows as CSV, one line per policy plus a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "policy,seed,total_time_s,total_energy_j,slowdown_pct,energy_saving_pct,pass\n",
        );
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                row.policy,
                row.seed,
                row.total_time_s,
                row.total_energy_j,
                row.slowdown_pct,
                row.energy_saving_pct,
                row.pass,
            ));
        }
        out
    }
}

/// Builds a report from at least two summaries of runs over the same trace
/// set. The fastest run is the slowdown reference; `baseline` names the
/// run whose energy anchors the savings column.
pub fn compute_report(
    summaries: &[RunSummary],
    baseline: &str,
    energy_threshold_pct: f64,
    slowdown_threshold_pct: f64,
) -> Result<CompareReport> {
    if summaries.len() < 2 {
        return Err(Error::Invalid(format!(
            "a comparison needs at least two results, got {}",
            summaries.len()
        )));
    }
    let reference = &summaries[0];
    for summary in summaries {
        summary.validate()?;
        if summary.manifest_sha256 != reference.manifest_sha256 {
            return Err(Error::Invalid(format!(
                "results come from different trace sets: {} ({}) vs {} ({})",
                reference.policy,
                reference.benchmark,
                summary.policy,
                summary.benchmark
            )));
        }
    }

    let baseline_rows: Vec<&RunSummary> = summaries
        .iter()
        .filter(|s| s.policy == baseline)
        .collect();
    let baseline_energy = match baseline_rows.as_slice() {
        [only] => only.total_energy_j,
        [] => {
            let mut names: Vec<&str> = summaries.iter().map(|s| s.policy.as_str()).collect();
            names.sort_unstable();
            names.dedup();
            return Err(Error::Invalid(format!(
                "baseline policy {baseline:?} is not among the results ({})",
                names.join(", ")
            )));
        }
        _ => {
            return Err(Error::Invalid(format!(
                "baseline policy {baseline:?} appears more than once in the results"
            )));
        }
    };
    if baseline_energy <= 0.0 {
        return Err(Error::Invalid(format!(
            "baseline {baseline:?} reports no energy, savings are undefined"
        )));
    }

    let fastest = summaries
        .iter()
        .map(|s| s.total_time_s)
        .fold(f64::INFINITY, f64::min);

    let mut rows: Vec<CompareRow> = summaries
        .iter()
        .map(|s| {
            let slowdown_pct = (s.total_time_s / fastest - 1.0) * 100.0;
            let energy_saving_pct = (1.0 - s.total_energy_j / baseline_energy) * 100.0;
            CompareRow {
                policy: s.policy.clone(),
                seed: s.seed,
                total_time_s: s.total_time_s,
                total_energy_j: s.total_energy_j,
                slowdown_pct,
                energy_saving_pct,
                pass: energy_saving_pct >= energy_threshold_pct
                    && slowdown_pct <= slowdown_threshold_pct,
            }
        })
        .collect();
    rows.sort_by(|a, b| {
        (a.total_time_s, a.total_energy_j, &a.policy)
            .partial_cmp(&(b.total_time_s, b.total_energy_j, &b.policy))
            .expect("summaries hold finite totals")
    });

    Ok(CompareReport {
        schema: COMPARE_SCHEMA.to_string(),
        format_version: COMPARE_FORMAT_VERSION,
        benchmark: reference.benchmark.clone(),
        manifest_sha256: reference.manifest_sha256.clone(),
        baseline: baseline.to_string(),
        energy_threshold_pct,
        slowdown_threshold_pct,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{RUN_FORMAT_VERSION, RUN_SCHEMA};

    fn summary(policy: &str, time: f64, energy: f64) -> RunSummary {
        RunSummary {
            schema: RUN_SCHEMA.to_string(),
            format_version: RUN_FORMAT_VERSION,
            policy: policy.to_string(),
            seed: 0,
            benchmark: "bench".to_string(),
            manifest_sha256: "a".repeat(64),
            k: 10,
            total_time_s: time,
            total_energy_j: energy,
            total_instructions: 1_000_000,
        }
    }

    #[test]
    fn ten_percent_slower_twenty_percent_cheaper_passes() {
        let a = summary("a", 10.0, 100.0);
        let b = summary("b", 11.0, 80.0);
        let report = compute_report(&[a, b], "a", 10.0, 15.0).unwrap();
        // Rows sorted fastest first.
        assert_eq!(report.rows[0].policy, "a");
        assert_eq!(report.rows[0].slowdown_pct, 0.0);
        assert_eq!(report.rows[0].energy_saving_pct, 0.0);
        assert!(!report.rows[0].pass, "saving 0% < 10%");
        let b_row = &report.rows[1];
        assert_eq!(b_row.policy, "b");
        assert!((b_row.slowdown_pct - 10.0).abs() < 1e-12);
        assert!((b_row.energy_saving_pct - 20.0).abs() < 1e-12);
        assert!(b_row.pass);
    }

    #[test]
    fn identical_results_pass_only_with_non_positive_threshold() {
        let rows = [summary("x", 5.0, 50.0), summary("y", 5.0, 50.0)];
        let zero = compute_report(&rows, "x", 0.0, 15.0).unwrap();
        assert!(zero.rows.iter().all(|r| r.slowdown_pct == 0.0));
        assert!(zero.rows.iter().all(|r| r.energy_saving_pct == 0.0));
        assert!(zero.rows.iter().all(|r| r.pass));
        let strict = compute_report(&rows, "x", 10.0, 15.0).unwrap();
        assert!(strict.rows.iter().all(|r| !r.pass));
    }

    #[test]
    fn mismatched_manifests_are_rejected() {
        let a = summary("a", 10.0, 100.0);
        let mut b = summary("b", 11.0, 80.0);
        b.manifest_sha256 = "b".repeat(64);
        let err = compute_report(&[a, b], "a", 10.0, 15.0).unwrap_err();
        assert!(err.to_string().contains("different trace sets"));
    }

    #[test]
    fn baseline_must_exist_exactly_once() {
        let a = summary("a", 10.0, 100.0);
        let b = summary("b", 11.0, 80.0);
        let err = compute_report(&[a.clone(), b.clone()], "c", 10.0, 15.0).unwrap_err();
        let message = err.to_string();
        assert!(message.contains("\"c\""));
        assert!(message.contains("a, b"), "lists what is available: {message}");

        let twice = [a.clone(), a.clone(), b];
        let err = compute_report(&twice, "a", 10.0, 15.0).unwrap_err();
        assert!(err.to_string().contains("more than once"));
    }

    #[test]
    fn too_few_results_are_rejected() {
        let err = compute_report(&[summary("a", 1.0, 1.0)], "a", 0.0, 0.0).unwrap_err();
        assert!(err.to_string().contains("at least two"));
    }

    #[test]
    fn report_round_trips_and_renders_csv() {
        let a = summary("a", 10.0, 100.0);
        let b = summary("b", 11.0, 80.0);
        let report = compute_report(&[a, b], "a", 10.0, 15.0).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("report.json");
        report.write_json(&path).unwrap();
        assert_eq!(CompareReport::read_json(&path).unwrap(), report);

        let csv = report.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with("policy,seed,"));
        assert!(lines[1].starts_with("a,"));
        assert!(lines[2].starts_with("b,"));
        assert!(lines[2].ends_with("true"));
    }
}
