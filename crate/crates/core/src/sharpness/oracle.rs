//! Pre-registered sweep values: run once, stored, and reproduced later.

use serde::{Deserialize, Serialize};

use super::{run_sweep, SweepConfig};
use crate::error::HardyError;

pub const BASELINE_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleCase {
    pub name: String,
    pub sweep: SweepConfig,
}

/// Cases of an `oracle` run, as read from TOML (`[[case]]` tables).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    #[serde(rename = "case")]
    pub cases: Vec<OracleCase>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleRow {
    pub delta: f64,
    pub quotient: f64,
    pub l0: f64,
    pub l1: f64,
    pub l2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleEntry {
    pub name: String,
    pub config: SweepConfig,
    pub rows: Vec<OracleRow>,
    /// `δ` values that produced no row.
    pub skipped: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleBaseline {
    pub version: u32,
    pub entries: Vec<OracleEntry>,
}

impl OracleBaseline {
    pub fn entry(&self, name: &str) -> Option<&OracleEntry> {
        self.entries.iter().find(|e| e.name == name)
    }
}

pub fn run_oracle(config: &OracleConfig) -> Result<OracleBaseline, HardyError> {
    let entries = config
        .cases
        .iter()
        .map(|case| {
            let report = run_sweep(&case.sweep)?;
            Ok(OracleEntry {
                name: case.name.clone(),
                config: case.sweep.clone(),
                rows: report
                    .rows
                    .iter()
                    .map(|r| OracleRow {
                        delta: r.delta,
                        quotient: r.quotient,
                        l0: r.breakdown.l0,
                        l1: r.breakdown.l1,
                        l2: r.breakdown.l2,
                    })
                    .collect(),
                skipped: report.skipped.iter().map(|s| s.delta).collect(),
            })
        })
        .collect::<Result<_, HardyError>>()?;
    Ok(OracleBaseline { version: BASELINE_VERSION, entries })
}

/// Rows of `fresh` whose `Q`, `l₀`, `l₁` or `l₂` differ from `stored` by more
/// than `rel_tol` relative, described one per string.
pub fn compare_entries(stored: &OracleEntry, fresh: &OracleEntry, rel_tol: f64) -> Vec<String> {
    let mut out = Vec::new();
    if stored.rows.len() != fresh.rows.len() {
        out.push(format!("{}: {} stored rows, {} fresh rows", stored.name, stored.rows.len(), fresh.rows.len()));
        return out;
    }
    let close = |a: f64, b: f64| (a - b).abs() <= rel_tol * b.abs().max(f64::MIN_POSITIVE);
    for (s, f) in stored.rows.iter().zip(&fresh.rows) {
        for (label, a, b) in [("delta", f.delta, s.delta), ("Q", f.quotient, s.quotient), ("l0", f.l0, s.l0), ("l1", f.l1, s.l1), ("l2", f.l2, s.l2)] {
            if !close(a, b) {
                out.push(format!("{} at delta = {}: {label} = {a:e}, stored {b:e}", stored.name, s.delta));
            }
        }
    }
    out
}
