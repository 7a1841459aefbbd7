use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::config::{parse_json, LoadedRun, RunConfig};
use super::csv_out::{self, num, opt};
use super::ExperimentError;
use crate::oracle::{threshold_stationary, ChainParams};
use crate::policies::PolicyConfig;
use crate::sim::{self, DecisionLogMode, SimMetrics};

/// One row of the metrics CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub policy: String,
    pub n: usize,
    pub x_s: f64,
    pub t: Option<u64>,
    pub seed: u64,
    pub num_steps: u64,
    pub o_s_hat: f64,
    pub migrations: u64,
    pub migration_hop_cost: f64,
    pub response_cost: f64,
    pub avg_move_time: f64,
}

impl MetricsRow {
    pub fn fields(&self) -> Vec<String> {
        vec![
            self.policy.clone(),
            self.n.to_string(),
            num(self.x_s),
            opt(self.t),
            self.seed.to_string(),
            self.num_steps.to_string(),
            num(self.o_s_hat),
            self.migrations.to_string(),
            num(self.migration_hop_cost),
            num(self.response_cost),
            num(self.avg_move_time),
        ]
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub row: MetricsRow,
    pub metrics: SimMetrics,
}

impl RunOutcome {
    pub fn metrics_csv(&self) -> Vec<u8> {
        csv_out::to_csv_bytes(&csv_out::METRICS_HEADER, [self.row.fields()])
    }

    pub fn decisions_csv(&self) -> Vec<u8> {
        csv_out::to_csv_bytes(
            &csv_out::DECISION_HEADER,
            self.metrics
                .decision_log
                .iter()
                .map(csv_out::decision_fields),
        )
    }
}

fn with_seed(run: &LoadedRun, seed: Option<u64>) -> LoadedRun {
    let mut run = run.clone();
    if let Some(s) = seed {
        run.config.workload.seed = s;
    }
    run
}

/// Executes one configured simulation.
pub fn run_single(
    run: &LoadedRun,
    seed_override: Option<u64>,
    log_mode: DecisionLogMode,
) -> Result<RunOutcome, ExperimentError> {
    let run = with_seed(run, seed_override);
    let cfg = run.sim_config(log_mode)?;
    let metrics = sim::run(&cfg)?;
    let row = MetricsRow {
        policy: run.config.policy.name().to_string(),
        n: cfg.topology.n(),
        x_s: run.config.reported_x_s(&cfg.workload, cfg.designated),
        t: run.config.policy.threshold(),
        seed: cfg.workload.seed,
        num_steps: cfg.num_steps,
        o_s_hat: metrics.o_s_hat,
        migrations: metrics.migrations,
        migration_hop_cost: metrics.migration_hop_cost,
        response_cost: metrics.response_cost,
        avg_move_time: metrics.avg_move_time,
    };
    Ok(RunOutcome { row, metrics })
}

/// The parameter a sweep varies. Serialized as `{"x_s": [..]}`,
/// `{"t": [..]}`, `{"fragment_size": [..]}`, `{"rate": [..]}` or
/// `{"active_count": [..]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    #[serde(rename = "x_s")]
    XS(Vec<f64>),
    T(Vec<u64>),
    FragmentSize(Vec<f64>),
    Rate(Vec<f64>),
    ActiveCount(Vec<usize>),
}

impl Axis {
    pub fn name(&self) -> &'static str {
        match self {
            Axis::XS(_) => "x_s",
            Axis::T(_) => "t",
            Axis::FragmentSize(_) => "fragment_size",
            Axis::Rate(_) => "rate",
            Axis::ActiveCount(_) => "active_count",
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Axis::XS(v) | Axis::FragmentSize(v) | Axis::Rate(v) => v.len(),
            Axis::T(v) => v.len(),
            Axis::ActiveCount(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn label(&self, i: usize) -> String {
        match self {
            Axis::XS(v) | Axis::FragmentSize(v) | Axis::Rate(v) => num(v[i]),
            Axis::T(v) => v[i].to_string(),
            Axis::ActiveCount(v) => v[i].to_string(),
        }
    }

    /// Returns `base` with the `i`-th axis value substituted.
    pub fn apply(&self, base: &RunConfig, i: usize) -> Result<RunConfig, ExperimentError> {
        let key = format!("axis.{}", self.name());
        let mut c = base.clone();
        match self {
            Axis::XS(v) => {
                if c.workload.probs.is_some() {
                    return Err(ExperimentError::config(
                        &key,
                        "base workload uses explicit probs",
                    ));
                }
                c.workload.x_s = Some(v[i]);
            }
            Axis::T(v) => {
                c.policy = c.policy.with_threshold(v[i]).ok_or_else(|| {
                    ExperimentError::config(
                        &key,
                        format!("policy '{}' has no threshold", c.policy.name()),
                    )
                })?;
            }
            Axis::FragmentSize(v) => {
                let mut frags = c.fragment_blocks();
                for f in &mut frags {
                    f.size = v[i];
                }
                c.fragments = Some(frags);
            }
            Axis::Rate(v) => c.workload.rate = v[i],
            Axis::ActiveCount(v) => {
                if v[i] == 0 {
                    return Err(ExperimentError::config(
                        &key,
                        "active_count must be at least 1",
                    ));
                }
                c.workload.active = Some((0..v[i]).collect());
            }
        }
        Ok(c)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// Inline run config or a path to one, relative to the sweep file.
    pub base: Value,
    pub axis: Axis,
    #[serde(default = "one_rep")]
    pub replications: u32,
}

fn one_rep() -> u32 {
    1
}

impl SweepSpec {
    pub fn load(path: &Path) -> Result<(Self, std::path::PathBuf), ExperimentError> {
        let text = std::fs::read_to_string(path).map_err(|e| ExperimentError::io(path, e))?;
        let spec = parse_json(&text, "sweep")?;
        Ok((
            spec,
            path.parent().map(Path::to_path_buf).unwrap_or_default(),
        ))
    }

    pub fn base_run(&self, base_dir: &Path) -> Result<LoadedRun, ExperimentError> {
        match &self.base {
            Value::String(p) => LoadedRun::load(&base_dir.join(p)),
            Value::Object(_) => {
                let config: RunConfig = serde_json::from_value(self.base.clone())
                    .map_err(|e| ExperimentError::config("base", e.to_string()))?;
                Ok(LoadedRun::from_config(config, base_dir))
            }
            _ => Err(ExperimentError::config(
                "base",
                "expected a run config object or a path",
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub axis: &'static str,
    pub value: String,
    pub replication: u32,
    pub metrics: MetricsRow,
    pub mean_o_s_hat: f64,
    pub mean_migrations: f64,
    pub mean_response_cost: f64,
    pub mean_avg_move_time: f64,
}

impl SweepRow {
    pub fn fields(&self) -> Vec<String> {
        let mut f = vec![
            "sim".to_string(),
            self.axis.to_string(),
            self.value.clone(),
            self.replication.to_string(),
        ];
        f.extend(self.metrics.fields());
        f.extend([
            num(self.mean_o_s_hat),
            num(self.mean_migrations),
            num(self.mean_response_cost),
            num(self.mean_avg_move_time),
        ]);
        f
    }
}

pub fn sweep_csv(rows: &[SweepRow]) -> Vec<u8> {
    csv_out::to_csv_bytes(&csv_out::sweep_header(), rows.iter().map(SweepRow::fields))
}

/// Runs every `(axis value, replication)` cell, in parallel, and returns rows
/// in axis order then replication order. Replication `i` uses `seed + i`.
pub fn run_sweep(
    spec: &SweepSpec,
    base_dir: &Path,
    seed_override: Option<u64>,
) -> Result<Vec<SweepRow>, ExperimentError> {
    if spec.axis.is_empty() {
        return Err(ExperimentError::config(
            &format!("axis.{}", spec.axis.name()),
            "axis has no values",
        ));
    }
    if spec.replications == 0 {
        return Err(ExperimentError::config(
            "replications",
            "must be at least 1",
        ));
    }
    let base = spec.base_run(base_dir)?;
    let base_seed = seed_override.unwrap_or(base.config.workload.seed);

    let cells: Vec<(usize, u32)> = (0..spec.axis.len())
        .flat_map(|i| (0..spec.replications).map(move |r| (i, r)))
        .collect();
    let results: Vec<MetricsRow> = cells
        .par_iter()
        .map(|&(i, r)| {
            let config = spec.axis.apply(&base.config, i)?;
            let run = LoadedRun::from_config(config, base.base_dir.clone());
            let seed = base_seed.wrapping_add(u64::from(r));
            Ok(run_single(&run, Some(seed), DecisionLogMode::MovesOnly)?.row)
        })
        .collect::<Result<_, ExperimentError>>()?;

    let reps = spec.replications as usize;
    let mut rows = Vec::with_capacity(results.len());
    for (i, group) in results.chunks(reps).enumerate() {
        let k = group.len() as f64;
        let mean = |f: fn(&MetricsRow) -> f64| group.iter().map(f).sum::<f64>() / k;
        let m_os = mean(|m| m.o_s_hat);
        let m_mig = mean(|m| m.migrations as f64);
        let m_resp = mean(|m| m.response_cost);
        let m_move = mean(|m| m.avg_move_time);
        for (r, m) in group.iter().enumerate() {
            rows.push(SweepRow {
                axis: spec.axis.name(),
                value: spec.axis.label(i),
                replication: r as u32,
                metrics: m.clone(),
                mean_o_s_hat: m_os,
                mean_migrations: m_mig,
                mean_response_cost: m_resp,
                mean_avg_move_time: m_move,
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub policy: String,
    pub seed: u64,
    pub num_steps: u64,
    pub o_s_hat: f64,
    pub migrations: u64,
    pub migration_hop_cost: f64,
    pub response_cost: f64,
    pub avg_move_time: f64,
}

impl CompareRow {
    pub fn fields(&self) -> Vec<String> {
        vec![
            self.policy.clone(),
            self.seed.to_string(),
            self.num_steps.to_string(),
            num(self.o_s_hat),
            self.migrations.to_string(),
            num(self.migration_hop_cost),
            num(self.response_cost),
            num(self.avg_move_time),
        ]
    }
}

pub fn compare_csv(rows: &[CompareRow]) -> Vec<u8> {
    csv_out::to_csv_bytes(
        &csv_out::COMPARE_HEADER,
        rows.iter().map(CompareRow::fields),
    )
}

/// Runs the same workload and seed under each policy, in the given order.
pub fn compare(
    run: &LoadedRun,
    policies: &[PolicyConfig],
    seed_override: Option<u64>,
) -> Result<Vec<CompareRow>, ExperimentError> {
    if policies.len() < 2 {
        return Err(ExperimentError::config(
            "policies",
            format!(
                "need at least two policies to compare, got {}",
                policies.len()
            ),
        ));
    }
    policies
        .par_iter()
        .map(|p| {
            let mut r = run.clone();
            r.config.policy = p.clone();
            let out = run_single(&r, seed_override, DecisionLogMode::MovesOnly)?;
            Ok(CompareRow {
                policy: p.to_string(),
                seed: out.row.seed,
                num_steps: out.row.num_steps,
                o_s_hat: out.row.o_s_hat,
                migrations: out.row.migrations,
                migration_hop_cost: out.row.migration_hop_cost,
                response_cost: out.row.response_cost,
                avg_move_time: out.row.avg_move_time,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleRow {
    pub n: usize,
    pub x_s: f64,
    pub t: usize,
    pub o_s: f64,
}

impl OracleRow {
    pub fn fields(&self) -> Vec<String> {
        vec![
            "oracle".to_string(),
            self.n.to_string(),
            num(self.x_s),
            self.t.to_string(),
            num(self.o_s),
        ]
    }
}

pub fn oracle_csv(rows: &[OracleRow]) -> Vec<u8> {
    csv_out::to_csv_bytes(&csv_out::ORACLE_HEADER, rows.iter().map(OracleRow::fields))
}

/// Analytical steady-state residency for every `(x_s, t)` pair, `x_s` major.
pub fn oracle_grid(n: usize, x_s: &[f64], t: &[usize]) -> Result<Vec<OracleRow>, ExperimentError> {
    if x_s.is_empty() {
        return Err(ExperimentError::config("x_s", "no values given"));
    }
    if t.is_empty() {
        return Err(ExperimentError::config("t", "no values given"));
    }
    let mut rows = Vec::with_capacity(x_s.len() * t.len());
    for &x in x_s {
        for &tt in t {
            let r = threshold_stationary(&ChainParams::new(n, x, tt)?)?;
            rows.push(OracleRow {
                n,
                x_s: x,
                t: tt,
                o_s: r.o_s,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> RunConfig {
        parse_json(
            r#"{
                "topology": {"complete": 5},
                "policy": {"kind": "threshold", "t": 0},
                "workload": {"x_s": 0.2, "seed": 1},
                "num_steps": 2000
            }"#,
            "config",
        )
        .unwrap()
    }

    #[test]
    fn axis_parsing() {
        let a: Axis = serde_json::from_str(r#"{"x_s": [0.1, 0.2]}"#).unwrap();
        assert_eq!(a, Axis::XS(vec![0.1, 0.2]));
        let a: Axis = serde_json::from_str(r#"{"active_count": [2, 3]}"#).unwrap();
        assert_eq!(a.name(), "active_count");
        assert!(serde_json::from_str::<Axis>(r#"{"speed": [1]}"#).is_err());
    }

    #[test]
    fn sweep_rows_in_axis_order() {
        let spec = SweepSpec {
            base: serde_json::to_value(base()).unwrap(),
            axis: Axis::T(vec![0, 3, 1]),
            replications: 2,
        };
        let rows = run_sweep(&spec, Path::new("."), None).unwrap();
        let keys: Vec<(String, u32, u64)> = rows
            .iter()
            .map(|r| (r.value.clone(), r.replication, r.metrics.seed))
            .collect();
        assert_eq!(
            keys,
            vec![
                ("0".into(), 0, 1),
                ("0".into(), 1, 2),
                ("3".into(), 0, 1),
                ("3".into(), 1, 2),
                ("1".into(), 0, 1),
                ("1".into(), 1, 2),
            ]
        );
        let mean = (rows[0].metrics.o_s_hat + rows[1].metrics.o_s_hat) / 2.0;
        assert_eq!(rows[0].mean_o_s_hat, mean);
    }

    #[test]
    fn empty_axis_rejected() {
        let spec = SweepSpec {
            base: serde_json::to_value(base()).unwrap(),
            axis: Axis::XS(vec![]),
            replications: 1,
        };
        assert_eq!(
            run_sweep(&spec, Path::new("."), None)
                .unwrap_err()
                .exit_code(),
            2
        );
    }

    #[test]
    fn threshold_axis_needs_threshold_policy() {
        let mut c = base();
        c.policy = PolicyConfig::Optimal { counter_cap: None };
        assert_eq!(Axis::T(vec![1]).apply(&c, 0).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn compare_needs_two_policies() {
        let run = LoadedRun::from_config(base(), ".");
        let err = compare(&run, &[PolicyConfig::Threshold { t: 3 }], None).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn oracle_rows() {
        let rows = oracle_grid(5, &[0.2], &(0..=10).collect::<Vec<_>>()).unwrap();
        assert_eq!(rows.len(), 11);
        for r in &rows {
            assert!((r.o_s - 0.2).abs() < 1e-12);
        }
        assert_eq!(oracle_grid(5, &[1.3], &[0]).unwrap_err().exit_code(), 2);
    }
}
