//! Ready-made configs written by the `fixtures` command.
//!
//! The threshold sweeps use the two-level workload on a complete five-site
//! graph. Parameters of the fragment-size, rate and active-site sweeps and of
//! the oscillation comparison are chosen to exercise each axis.

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use super::config::{OscillationBlock, RunConfig, TopologyFile, WorkloadBlock};
use super::runner::{Axis, SweepSpec};
use super::{csv_out, ExperimentError};
use crate::fixtures;
use crate::policies::{FnaParams, NnaTrigger, PolicyConfig};

pub const FIG3_FILE: &str = "fig3.json";

pub const FIG1_THRESHOLDS: [u64; 3] = [0, 3, 10];
pub const FIG2_X_S: [f64; 5] = [0.28, 0.24, 0.2, 0.16, 0.12];
pub const SWEEP_STEPS: u64 = 200_000;

/// Sites of the fig3 fixture that alternate as the hot site.
pub const OSCILLATION_SITES: (char, char) = ('G', 'H');
pub const OSCILLATION_PERIOD: u64 = 50;
pub const OSCILLATION_HOT_MASS: f64 = 0.95;
pub const OSCILLATION_STEPS: u64 = 100_000;

pub fn fig3_topology_file() -> TopologyFile {
    TopologyFile::from_topology(&fixtures::fig3())
}

fn workload(x_s: f64, seed: u64) -> WorkloadBlock {
    WorkloadBlock {
        x_s: Some(x_s),
        hot: Some(0),
        probs: None,
        rate: 1.0,
        active: None,
        seed,
        oscillation: None,
    }
}

fn threshold_base(t: u64, x_s: f64) -> RunConfig {
    RunConfig {
        topology: json!({"complete": 5}),
        fragments: None,
        policy: PolicyConfig::Threshold { t },
        workload: workload(x_s, 1),
        num_steps: SWEEP_STEPS,
        designated: None,
        per_hop_latency: 1.0,
        migration_blocking: false,
        output: None,
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("configs serialize")
}

/// Residency against designated-site probability for a fixed threshold.
pub fn fig1_sweep(t: u64) -> SweepSpec {
    SweepSpec {
        base: to_value(&threshold_base(t, 0.5)),
        axis: Axis::XS((1..20).map(|i| i as f64 / 20.0).collect()),
        replications: 1,
    }
}

/// Residency against threshold for a fixed designated-site probability.
pub fn fig2_sweep(x_s: f64) -> SweepSpec {
    SweepSpec {
        base: to_value(&threshold_base(0, x_s)),
        axis: Axis::T((0..=20).collect()),
        replications: 1,
    }
}

/// Fragment at A with every request coming from G, H, I or E.
pub fn fig3_nna_run() -> RunConfig {
    let n = fixtures::FIG3_LABELS.len();
    let mut probs = vec![0.0; n];
    for c in ['G', 'H', 'I', 'E'] {
        probs[fixtures::fig3_site(c).0] = 0.25;
    }
    RunConfig {
        topology: Value::String(FIG3_FILE.into()),
        fragments: None,
        policy: PolicyConfig::Nna {
            trigger: NnaTrigger::OptimalDominance,
            counter_cap: None,
        },
        workload: WorkloadBlock {
            x_s: None,
            hot: None,
            probs: Some(vec![probs]),
            rate: 1.0,
            active: None,
            seed: 1,
            oscillation: None,
        },
        num_steps: 1_000,
        designated: Some(fixtures::fig3_site('G').0),
        per_hop_latency: 1.0,
        migration_blocking: false,
        output: None,
    }
}

/// Hot site alternating between two adjacent fig3 sites every
/// [`OSCILLATION_PERIOD`] requests. Policy is NNA; compare against FNA.
pub fn oscillation_run(seed: u64) -> RunConfig {
    let n = fixtures::FIG3_LABELS.len();
    let (a, b) = (
        fixtures::fig3_site(OSCILLATION_SITES.0).0,
        fixtures::fig3_site(OSCILLATION_SITES.1).0,
    );
    let rest = (1.0 - OSCILLATION_HOT_MASS) / (n - 1) as f64;
    let mut probs = vec![rest; n];
    probs[a] = OSCILLATION_HOT_MASS;
    RunConfig {
        topology: Value::String(FIG3_FILE.into()),
        fragments: None,
        policy: PolicyConfig::Nna {
            trigger: NnaTrigger::OptimalDominance,
            counter_cap: None,
        },
        workload: WorkloadBlock {
            x_s: None,
            hot: None,
            probs: Some(vec![probs]),
            rate: 1.0,
            active: None,
            seed,
            oscillation: Some(OscillationBlock {
                a,
                b,
                period: OSCILLATION_PERIOD,
            }),
        },
        num_steps: OSCILLATION_STEPS,
        designated: Some(a),
        per_hop_latency: 1.0,
        migration_blocking: false,
        output: None,
    }
}

pub fn oscillation_policies() -> Vec<PolicyConfig> {
    vec![
        PolicyConfig::Nna {
            trigger: NnaTrigger::OptimalDominance,
            counter_cap: None,
        },
        PolicyConfig::Fna(FnaParams::default()),
    ]
}

fn benchmark_base(policy: PolicyConfig) -> RunConfig {
    let mut c = threshold_base(0, 0.4);
    c.topology = Value::String(FIG3_FILE.into());
    c.policy = policy;
    c.workload.hot = Some(fixtures::fig3_site('G').0);
    c.num_steps = 50_000;
    c.migration_blocking = true;
    c
}

/// Axis sweeps over fragment size, request rate and number of active sites,
/// one per policy, keyed by file stem.
pub fn benchmark_sweeps() -> Vec<(String, SweepSpec)> {
    let axes = [
        Axis::FragmentSize(vec![0.5, 1.0, 2.0, 4.0, 8.0]),
        Axis::Rate(vec![0.25, 0.5, 0.75, 1.0]),
        Axis::ActiveCount(vec![2, 3, 5, 7, 9]),
    ];
    let mut out = Vec::new();
    for policy in oscillation_policies() {
        for axis in &axes {
            out.push((
                format!("bench_{}_{}", axis.name(), policy.name()),
                SweepSpec {
                    base: to_value(&benchmark_base(policy.clone())),
                    axis: axis.clone(),
                    replications: 3,
                },
            ));
        }
    }
    out
}

fn stem(x: f64) -> String {
    format!("{:02}", (x * 100.0).round() as u32)
}

/// Every fixture as `(file name, pretty JSON)`, in a fixed order.
pub fn all() -> Vec<(String, String)> {
    let pretty = |v: Value| serde_json::to_string_pretty(&v).expect("json") + "\n";
    let mut files = vec![(
        FIG3_FILE.to_string(),
        pretty(to_value(&fig3_topology_file())),
    )];
    for t in FIG1_THRESHOLDS {
        files.push((format!("fig1_t{t}.json"), pretty(to_value(&fig1_sweep(t)))));
    }
    for x in FIG2_X_S {
        files.push((
            format!("fig2_x{}.json", stem(x)),
            pretty(to_value(&fig2_sweep(x))),
        ));
    }
    files.push(("fig3_nna.json".into(), pretty(to_value(&fig3_nna_run()))));
    files.push((
        "oscillation.json".into(),
        pretty(to_value(&oscillation_run(1))),
    ));
    for (name, spec) in benchmark_sweeps() {
        files.push((format!("{name}.json"), pretty(to_value(&spec))));
    }
    files
}

/// Writes [`all`] into `dir` and returns the written paths.
pub fn write_all(dir: &Path) -> Result<Vec<PathBuf>, ExperimentError> {
    all()
        .into_iter()
        .map(|(name, body)| {
            let path = dir.join(name);
            csv_out::write_file(&path, body.as_bytes())?;
            Ok(path)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::config::LoadedRun;
    use crate::sim::DecisionLogMode;

    #[test]
    fn fig3_file_round_trips() {
        let t = fig3_topology_file().build().unwrap();
        assert_eq!(t.links(), fixtures::fig3().links());
    }

    #[test]
    fn fixture_names_are_unique() {
        let files = all();
        let mut names: Vec<_> = files.iter().map(|(n, _)| n.clone()).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), files.len());
        assert!(names.contains(&"fig2_x28.json".to_string()));
    }

    #[test]
    fn written_configs_load() {
        let dir = tempfile::tempdir().unwrap();
        write_all(dir.path()).unwrap();
        let run = LoadedRun::load(&dir.path().join("oscillation.json")).unwrap();
        run.sim_config(DecisionLogMode::MovesOnly).unwrap();
        let run = LoadedRun::load(&dir.path().join("fig3_nna.json")).unwrap();
        run.sim_config(DecisionLogMode::MovesOnly).unwrap();
        for (name, _) in benchmark_sweeps() {
            let (spec, base) = SweepSpec::load(&dir.path().join(format!("{name}.json"))).unwrap();
            spec.base_run(&base)
                .unwrap()
                .sim_config(DecisionLogMode::MovesOnly)
                .unwrap();
        }
    }
}
