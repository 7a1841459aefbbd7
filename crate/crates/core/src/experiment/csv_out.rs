//! Fixed CSV schemas. Headers are part of the external interface; change
//! them only together with the golden-file tests.

use std::io::Write;
use std::path::Path;

use super::ExperimentError;
use crate::allocation::MigrationDecision;
use crate::sim::DecisionRecord;

pub const METRICS_HEADER: [&str; 11] = [
    "policy",
    "n",
    "x_s",
    "t",
    "seed",
    "num_steps",
    "o_s_hat",
    "migrations",
    "migration_hop_cost",
    "response_cost",
    "avg_move_time",
];

pub const DECISION_HEADER: [&str; 8] = [
    "step",
    "fragment",
    "requester",
    "owner_before",
    "decision",
    "dest",
    "trigger_reason",
    "inhibition",
];

/// Leading columns of a sweep row; the metrics columns and the per-axis
/// means follow.
pub const SWEEP_PREFIX: [&str; 4] = ["source", "axis", "value", "replication"];
pub const SWEEP_MEANS: [&str; 4] = [
    "mean_o_s_hat",
    "mean_migrations",
    "mean_response_cost",
    "mean_avg_move_time",
];

pub const ORACLE_HEADER: [&str; 5] = ["source", "n", "x_s", "t", "o_s"];

pub const COMPARE_HEADER: [&str; 8] = [
    "policy",
    "seed",
    "num_steps",
    "o_s_hat",
    "migrations",
    "migration_hop_cost",
    "response_cost",
    "avg_move_time",
];

pub fn sweep_header() -> Vec<&'static str> {
    SWEEP_PREFIX
        .iter()
        .chain(METRICS_HEADER.iter())
        .chain(SWEEP_MEANS.iter())
        .copied()
        .collect()
}

/// Shortest round-trip decimal form.
pub fn num(x: f64) -> String {
    format!("{x}")
}

pub fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn decision_fields(r: &DecisionRecord) -> Vec<String> {
    let (kind, dest) = match r.decision {
        MigrationDecision::Stay => ("stay", String::new()),
        MigrationDecision::Move { dest, .. } => ("move", dest.to_string()),
    };
    vec![
        r.step.to_string(),
        r.fragment.to_string(),
        r.requester.to_string(),
        r.owner_before.to_string(),
        kind.to_string(),
        dest,
        r.reason.as_str().to_string(),
        r.inhibition.map(num).unwrap_or_default(),
    ]
}

pub fn to_csv_bytes<S: AsRef<str>>(
    header: &[S],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header.iter().map(|h| h.as_ref()))
        .expect("writing to memory cannot fail");
    for row in rows {
        w.write_record(&row).expect("writing to memory cannot fail");
    }
    w.into_inner().expect("flushing to memory cannot fail")
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), ExperimentError> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).map_err(|e| ExperimentError::io(dir, e))?;
        }
    }
    let mut f = std::fs::File::create(path).map_err(|e| ExperimentError::io(path, e))?;
    f.write_all(bytes).map_err(|e| ExperimentError::io(path, e))
}
