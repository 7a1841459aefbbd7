//! The four migration algorithms and a closed enum to select between them.

pub mod fna;
pub mod fuzzy;
pub mod nna;
pub mod optimal;
pub mod threshold;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::allocation::{
    AccessEvent, AllocationError, AllocationPolicy, Decision, FragmentId, Placement,
};
use crate::num::Scalar;
use crate::topology::{SiteId, Topology};

pub use fna::{FnaParams, FnaPolicy};
pub use nna::{NnaPolicy, NnaTrigger};
pub use optimal::OptimalPolicy;
pub use threshold::ThresholdPolicy;

/// Policy selection as written in run configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PolicyConfig {
    Optimal {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        counter_cap: Option<u64>,
    },
    Threshold {
        t: u64,
    },
    Nna {
        #[serde(default)]
        trigger: NnaTrigger,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        counter_cap: Option<u64>,
    },
    Fna(FnaParams),
}

impl PolicyConfig {
    pub fn name(&self) -> &'static str {
        match self {
            PolicyConfig::Optimal { .. } => "optimal",
            PolicyConfig::Threshold { .. } => "threshold",
            PolicyConfig::Nna { .. } => "nna",
            PolicyConfig::Fna(_) => "fna",
        }
    }

    /// The threshold value, for policies that have one.
    pub fn threshold(&self) -> Option<u64> {
        match self {
            PolicyConfig::Threshold { t } => Some(*t),
            PolicyConfig::Nna {
                trigger: NnaTrigger::FixedThreshold(t),
                ..
            } => Some(*t),
            _ => None,
        }
    }

    pub fn with_threshold(&self, t: u64) -> Option<PolicyConfig> {
        match self {
            PolicyConfig::Threshold { .. } => Some(PolicyConfig::Threshold { t }),
            PolicyConfig::Nna { counter_cap, .. } => Some(PolicyConfig::Nna {
                trigger: NnaTrigger::FixedThreshold(t),
                counter_cap: *counter_cap,
            }),
            _ => None,
        }
    }

    pub fn build(&self, fragments: usize, sites: usize) -> Policy {
        match self {
            PolicyConfig::Optimal { counter_cap } => {
                Policy::Optimal(OptimalPolicy::new(fragments, sites, *counter_cap))
            }
            PolicyConfig::Threshold { t } => Policy::Threshold(ThresholdPolicy::new(fragments, *t)),
            PolicyConfig::Nna {
                trigger,
                counter_cap,
            } => Policy::Nna(NnaPolicy::new(fragments, sites, *trigger, *counter_cap)),
            PolicyConfig::Fna(params) => Policy::Fna(FnaPolicy::new(fragments, sites, *params)),
        }
    }

    /// Parses the short form used on the command line: `optimal`,
    /// `threshold:T`, `nna`, `nna:T` (fixed-threshold trigger) or `fna`.
    pub fn parse_short(s: &str) -> Result<PolicyConfig, String> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let t = || -> Result<u64, String> {
            arg.ok_or_else(|| format!("policy '{s}' needs a threshold, e.g. {name}:3"))?
                .parse()
                .map_err(|_| format!("invalid threshold in policy '{s}'"))
        };
        match (name, arg) {
            ("optimal", None) => Ok(PolicyConfig::Optimal { counter_cap: None }),
            ("threshold", _) => Ok(PolicyConfig::Threshold { t: t()? }),
            ("nna", None) => Ok(PolicyConfig::Nna {
                trigger: NnaTrigger::OptimalDominance,
                counter_cap: None,
            }),
            ("nna", Some(_)) => Ok(PolicyConfig::Nna {
                trigger: NnaTrigger::FixedThreshold(t()?),
                counter_cap: None,
            }),
            ("fna", None) => Ok(PolicyConfig::Fna(FnaParams::default())),
            _ => Err(format!("unknown policy '{s}'")),
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        match self {
            PolicyConfig::Fna(params) => params.validate(),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for PolicyConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolicyConfig::Threshold { t } => write!(f, "threshold:{t}"),
            PolicyConfig::Nna {
                trigger: NnaTrigger::FixedThreshold(t),
                ..
            } => write!(f, "nna:{t}"),
            other => f.write_str(other.name()),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Policy {
    Optimal(OptimalPolicy),
    Threshold(ThresholdPolicy),
    Nna(NnaPolicy),
    Fna(FnaPolicy),
}

impl AllocationPolicy for Policy {
    fn name(&self) -> &'static str {
        match self {
            Policy::Optimal(p) => p.name(),
            Policy::Threshold(p) => p.name(),
            Policy::Nna(p) => p.name(),
            Policy::Fna(p) => p.name(),
        }
    }

    fn on_access<W: Scalar>(
        &mut self,
        placement: &Placement,
        topo: &Topology<W>,
        ev: &AccessEvent,
    ) -> Result<Decision, AllocationError> {
        match self {
            Policy::Optimal(p) => p.on_access(placement, topo, ev),
            Policy::Threshold(p) => p.on_access(placement, topo, ev),
            Policy::Nna(p) => p.on_access(placement, topo, ev),
            Policy::Fna(p) => p.on_access(placement, topo, ev),
        }
    }

    fn on_migrated(&mut self, fragment: FragmentId, from: SiteId, to: SiteId) {
        match self {
            Policy::Optimal(p) => p.on_migrated(fragment, from, to),
            Policy::Threshold(p) => p.on_migrated(fragment, from, to),
            Policy::Nna(p) => p.on_migrated(fragment, from, to),
            Policy::Fna(p) => p.on_migrated(fragment, from, to),
        }
    }
}
