//! JSON run configuration.
//!
//! ```json
//! {
//!   "topology": "fig3.json",
//!   "fragments": [{"size": 1.0, "owner": 0}],
//!   "policy": {"kind": "threshold", "t": 3},
//!   "workload": {"x_s": 0.28, "hot": 0, "rate": 1.0, "seed": 7},
//!   "num_steps": 200000,
//!   "designated": 0
//! }
//! ```
//!
//! `topology` is a path (relative to the config file), an inline
//! `{"n": .., "links": [[a, b, w], ..]}` object, or a generator
//! (`{"complete": n}`, `{"ring": n}`). Unknown keys are rejected everywhere.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::ExperimentError;
use crate::policies::PolicyConfig;
use crate::sim::{DecisionLogMode, FragmentSpec, SimConfig};
use crate::topology::{self, Link, SiteId, Topology};
use crate::workload::{symmetric_spec, Oscillation, WorkloadSpec};

/// On-disk topology: `{"n": int, "links": [[a, b, weight], ...]}`. The weight
/// may be omitted and defaults to 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologyFile {
    pub n: usize,
    pub links: Vec<LinkEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LinkEntry {
    Weighted(usize, usize, f64),
    Unit(usize, usize),
}

impl TopologyFile {
    pub fn from_topology(t: &Topology<f64>) -> Self {
        TopologyFile {
            n: t.n(),
            links: t
                .links()
                .iter()
                .map(|l| LinkEntry::Weighted(l.a.0, l.b.0, l.weight))
                .collect(),
        }
    }

    pub fn build(&self) -> Result<Topology<f64>, ExperimentError> {
        let links = self
            .links
            .iter()
            .map(|l| match *l {
                LinkEntry::Weighted(a, b, w) => Link::new(a, b, w),
                LinkEntry::Unit(a, b) => Link::new(a, b, 1.0),
            })
            .collect();
        Ok(Topology::build(self.n, links)?)
    }

    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        let text = std::fs::read_to_string(path).map_err(|e| ExperimentError::io(path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| ExperimentError::Topology(format!("{}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FragmentBlock {
    #[serde(default = "one")]
    pub size: f64,
    #[serde(default)]
    pub owner: usize,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OscillationBlock {
    pub a: usize,
    pub b: usize,
    pub period: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkloadBlock {
    /// Two-level model: probability of the `hot` site; the rest share `1 - x_s`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hot: Option<usize>,
    /// Explicit vectors, one per fragment or a single one shared by all.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probs: Option<Vec<Vec<f64>>>,
    #[serde(default = "one")]
    pub rate: f64,
    /// Defaults to every site.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub active: Option<Vec<usize>>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub oscillation: Option<OscillationBlock>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metrics: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decisions: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub topology: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fragments: Option<Vec<FragmentBlock>>,
    pub policy: PolicyConfig,
    pub workload: WorkloadBlock,
    pub num_steps: u64,
    /// Defaults to `workload.hot`, else site 0.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub designated: Option<usize>,
    #[serde(default = "one")]
    pub per_hop_latency: f64,
    #[serde(default)]
    pub migration_blocking: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputBlock>,
}

/// A parsed config plus the directory its relative paths resolve against.
#[derive(Debug, Clone)]
pub struct LoadedRun {
    pub config: RunConfig,
    pub base_dir: PathBuf,
}

fn invalid(key: &str, message: impl Into<String>) -> ExperimentError {
    ExperimentError::Config {
        key: key.to_string(),
        message: message.into(),
    }
}

pub(crate) fn parse_json<T: serde::de::DeserializeOwned>(
    text: &str,
    what: &str,
) -> Result<T, ExperimentError> {
    serde_json::from_str(text).map_err(|e| invalid(what, e.to_string()))
}

impl LoadedRun {
    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        let text = std::fs::read_to_string(path).map_err(|e| ExperimentError::io(path, e))?;
        let config = parse_json(&text, "config")?;
        Ok(LoadedRun {
            config,
            base_dir: path.parent().map(Path::to_path_buf).unwrap_or_default(),
        })
    }

    pub fn from_config(config: RunConfig, base_dir: impl Into<PathBuf>) -> Self {
        LoadedRun {
            config,
            base_dir: base_dir.into(),
        }
    }

    pub fn topology(&self) -> Result<Topology<f64>, ExperimentError> {
        resolve_topology(&self.config.topology, &self.base_dir)
    }

    pub fn sim_config(&self, log_mode: DecisionLogMode) -> Result<SimConfig<f64>, ExperimentError> {
        let topology = self.topology()?;
        self.config.sim_config_with(topology, log_mode)
    }
}

pub fn resolve_topology(value: &Value, base_dir: &Path) -> Result<Topology<f64>, ExperimentError> {
    match value {
        Value::String(p) => {
            let path = base_dir.join(p);
            TopologyFile::load(&path)?.build()
        }
        Value::Object(map) if map.contains_key("complete") || map.contains_key("ring") => {
            if map.len() != 1 {
                return Err(invalid(
                    "topology",
                    "generator objects take exactly one key",
                ));
            }
            let (kind, n) = map.iter().next().expect("one entry");
            let n = n
                .as_u64()
                .ok_or_else(|| invalid(&format!("topology.{kind}"), "expected a site count"))?
                as usize;
            if n == 0 {
                return Err(invalid(
                    &format!("topology.{kind}"),
                    "needs at least one site",
                ));
            }
            Ok(if kind == "complete" {
                topology::complete(n)
            } else {
                topology::ring(n)
            })
        }
        Value::Object(_) => {
            let file: TopologyFile = serde_json::from_value(value.clone())
                .map_err(|e| invalid("topology", e.to_string()))?;
            file.build()
        }
        _ => Err(invalid(
            "topology",
            "expected a file path, an {\"n\", \"links\"} object, or a generator",
        )),
    }
}

impl RunConfig {
    pub fn hot(&self) -> usize {
        self.workload.hot.unwrap_or(0)
    }

    pub fn designated_site(&self) -> usize {
        self.designated.unwrap_or_else(|| self.hot())
    }

    pub fn fragment_blocks(&self) -> Vec<FragmentBlock> {
        self.fragments.clone().unwrap_or_else(|| {
            vec![FragmentBlock {
                size: 1.0,
                owner: 0,
            }]
        })
    }

    /// Validates everything that does not need the topology and builds the
    /// simulator config.
    pub fn sim_config_with(
        &self,
        topology: Topology<f64>,
        log_mode: DecisionLogMode,
    ) -> Result<SimConfig<f64>, ExperimentError> {
        let n = topology.n();
        let fragments = self.fragment_blocks();
        if fragments.is_empty() {
            return Err(invalid("fragments", "at least one fragment is required"));
        }
        for (i, f) in fragments.iter().enumerate() {
            if !(f.size > 0.0 && f.size.is_finite()) {
                return Err(invalid(
                    &format!("fragments[{i}].size"),
                    format!("must be positive, got {}", f.size),
                ));
            }
            if f.owner >= n {
                return Err(invalid(
                    &format!("fragments[{i}].owner"),
                    format!("site {} out of range for {n} sites", f.owner),
                ));
            }
        }
        if self.num_steps == 0 {
            return Err(invalid("num_steps", "must be at least 1"));
        }
        let designated = self.designated_site();
        if designated >= n {
            return Err(invalid(
                "designated",
                format!("site {designated} out of range for {n} sites"),
            ));
        }
        if !(self.per_hop_latency > 0.0 && self.per_hop_latency.is_finite()) {
            return Err(invalid("per_hop_latency", "must be positive"));
        }
        self.policy.validate().map_err(|m| invalid("policy", m))?;

        let workload = self.workload_spec(n, fragments.len())?;
        Ok(SimConfig {
            topology,
            fragments: fragments
                .iter()
                .map(|f| FragmentSpec {
                    size: f.size,
                    owner: SiteId(f.owner),
                })
                .collect(),
            policy: self.policy.clone(),
            workload,
            num_steps: self.num_steps,
            designated: SiteId(designated),
            per_hop_latency: self.per_hop_latency,
            migration_blocking: self.migration_blocking,
            log_mode,
        })
    }

    pub fn workload_spec(
        &self,
        n: usize,
        fragments: usize,
    ) -> Result<WorkloadSpec, ExperimentError> {
        let w = &self.workload;
        let probs = match (&w.x_s, &w.probs) {
            (Some(_), Some(_)) => {
                return Err(invalid("workload", "give either x_s or probs, not both"))
            }
            (None, None) => return Err(invalid("workload", "one of x_s or probs is required")),
            (Some(x_s), None) => {
                if !(0.0..=1.0).contains(x_s) {
                    return Err(invalid(
                        "workload.x_s",
                        format!("must lie in [0, 1], got {x_s}"),
                    ));
                }
                let hot = self.hot();
                if hot >= n {
                    return Err(invalid(
                        "workload.hot",
                        format!("site {hot} out of range for {n} sites"),
                    ));
                }
                let v = if n == 1 {
                    vec![1.0]
                } else {
                    symmetric_spec(n, *x_s, SiteId(hot))
                        .map_err(|e| invalid("workload.x_s", e.to_string()))?
                };
                vec![v; fragments]
            }
            (None, Some(rows)) => match rows.len() {
                1 => vec![rows[0].clone(); fragments],
                len if len == fragments => rows.clone(),
                len => {
                    return Err(invalid(
                        "workload.probs",
                        format!("{len} vectors for {fragments} fragments"),
                    ))
                }
            },
        };
        let active: Vec<SiteId> = match &w.active {
            Some(a) => a.iter().copied().map(SiteId).collect(),
            None => (0..n).map(SiteId).collect(),
        };
        let spec = WorkloadSpec {
            n,
            probs,
            rate: w.rate,
            active,
            seed: w.seed,
            oscillation: w.oscillation.map(|o| Oscillation {
                a: SiteId(o.a),
                b: SiteId(o.b),
                period: o.period,
            }),
        };
        spec.validate().map_err(|e| {
            use crate::workload::WorkloadError as E;
            let key = match &e {
                E::InvalidRate(_) => "workload.rate",
                E::EmptyActiveSet => "workload.active",
                E::SiteOutOfRange { .. } if w.oscillation.is_some() => "workload.oscillation",
                E::SiteOutOfRange { .. } => "workload.active",
                E::InvalidPeriod => "workload.oscillation.period",
                _ => "workload.probs",
            };
            invalid(key, e.to_string())
        })?;
        crate::workload::WorkloadStream::new(&spec)
            .map_err(|e| invalid("workload.active", e.to_string()))?;
        Ok(spec)
    }

    /// Designated-site access probability reported in the metrics row.
    pub fn reported_x_s(&self, spec: &WorkloadSpec, designated: SiteId) -> f64 {
        match self.workload.x_s {
            Some(x) if self.hot() == designated.0 => x,
            _ => spec.probs[0][designated.0],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> RunConfig {
        parse_json(
            r#"{
                "topology": {"complete": 5},
                "policy": {"kind": "threshold", "t": 3},
                "workload": {"x_s": 0.28, "seed": 3},
                "num_steps": 100
            }"#,
            "config",
        )
        .unwrap()
    }

    #[test]
    fn minimal_config_builds() {
        let run = LoadedRun::from_config(base(), ".");
        let cfg = run.sim_config(DecisionLogMode::MovesOnly).unwrap();
        assert_eq!(cfg.topology.n(), 5);
        assert_eq!(cfg.fragments.len(), 1);
        assert_eq!(cfg.workload.probs[0][0], 0.28);
        assert_eq!(cfg.designated, SiteId(0));
    }

    #[test]
    fn unknown_key_is_named() {
        let err = parse_json::<RunConfig>(
            r#"{"topology": {"complete": 5}, "policy": {"kind": "optimal"},
                "workload": {"x_s": 0.2}, "num_steps": 1, "bogus": 1}"#,
            "config",
        )
        .unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("bogus"));
    }

    #[test]
    fn bad_probability_is_named() {
        let mut c = base();
        c.workload.x_s = Some(1.3);
        let err = LoadedRun::from_config(c, ".")
            .sim_config(DecisionLogMode::MovesOnly)
            .unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("x_s"));
    }

    #[test]
    fn inline_and_generated_topologies() {
        let v: Value = serde_json::from_str(r#"{"n": 3, "links": [[0, 1, 2.0], [1, 2]]}"#).unwrap();
        let t = resolve_topology(&v, Path::new(".")).unwrap();
        assert_eq!(*t.distance(SiteId(0), SiteId(2)), 3.0);
        let v: Value = serde_json::from_str(r#"{"ring": 4}"#).unwrap();
        assert_eq!(resolve_topology(&v, Path::new(".")).unwrap().n(), 4);
        let v: Value = serde_json::from_str(r#"{"n": 3, "links": [[0, 1]]}"#).unwrap();
        assert_eq!(
            resolve_topology(&v, Path::new("."))
                .unwrap_err()
                .exit_code(),
            3
        );
    }

    #[test]
    fn missing_topology_file_is_io() {
        let v = Value::String("does-not-exist.json".into());
        assert_eq!(
            resolve_topology(&v, Path::new("/nonexistent"))
                .unwrap_err()
                .exit_code(),
            3
        );
    }

    #[test]
    fn probs_and_active() {
        let mut c = base();
        c.workload.x_s = None;
        c.workload.probs = Some(vec![vec![0.1, 0.2, 0.3, 0.4, 0.0]]);
        c.workload.active = Some(vec![4]);
        let err = LoadedRun::from_config(c.clone(), ".")
            .sim_config(DecisionLogMode::MovesOnly)
            .unwrap_err();
        assert!(err.to_string().contains("workload.active"), "{err}");
        c.workload.active = Some(vec![2, 3]);
        assert!(LoadedRun::from_config(c, ".")
            .sim_config(DecisionLogMode::MovesOnly)
            .is_ok());
    }
}
