//! Allocation state shared by every policy: fragments, ownership, counters,
//! and the per-access decision interface.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::num::Scalar;
use crate::topology::{SiteId, Topology, TopologyError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FragmentId(pub usize);

impl FragmentId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for FragmentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fragment {
    pub id: FragmentId,
    /// Abstract data units; scales migration cost and in-flight time.
    pub size: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AllocationError {
    #[error("unknown fragment {0}")]
    UnknownFragment(FragmentId),
    #[error("migration of fragment {fragment} targets its current owner {owner}")]
    DestEqualsOwner { fragment: FragmentId, owner: SiteId },
    #[error("site {0} is not part of the topology")]
    UnknownSite(SiteId),
    #[error(transparent)]
    Routing(#[from] TopologyError),
}

/// Non-replicated placement: exactly one owner per fragment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Placement {
    owners: Vec<SiteId>,
}

impl Placement {
    pub fn new(owners: Vec<SiteId>) -> Self {
        Placement { owners }
    }

    pub fn owner(&self, f: FragmentId) -> Result<SiteId, AllocationError> {
        self.owners
            .get(f.0)
            .copied()
            .ok_or(AllocationError::UnknownFragment(f))
    }

    pub fn len(&self) -> usize {
        self.owners.len()
    }

    pub fn is_empty(&self) -> bool {
        self.owners.is_empty()
    }

    pub fn owners(&self) -> &[SiteId] {
        &self.owners
    }

    fn set_owner(&mut self, f: FragmentId, site: SiteId) {
        self.owners[f.0] = site;
    }
}

/// Per-fragment, per-site access counts. Increments saturate at `cap`, which
/// defaults to `u64::MAX`; a small cap reproduces the overflow anomaly of
/// narrow counter types.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterMatrix {
    sites: usize,
    counts: Vec<u64>,
    cap: u64,
}

impl CounterMatrix {
    pub fn new(fragments: usize, sites: usize, cap: Option<u64>) -> Self {
        CounterMatrix {
            sites,
            counts: vec![0; fragments * sites],
            cap: cap.unwrap_or(u64::MAX),
        }
    }

    pub fn get(&self, f: FragmentId, s: SiteId) -> u64 {
        self.counts[f.0 * self.sites + s.0]
    }

    pub fn increment(&mut self, f: FragmentId, s: SiteId) -> u64 {
        let slot = &mut self.counts[f.0 * self.sites + s.0];
        if *slot < self.cap {
            *slot += 1;
        }
        *slot
    }

    pub fn row(&self, f: FragmentId) -> &[u64] {
        &self.counts[f.0 * self.sites..(f.0 + 1) * self.sites]
    }

    /// Highest-count site, lowest id on ties.
    pub fn argmax(&self, f: FragmentId) -> SiteId {
        SiteId(argmax_by(self.row(f), |a, b| a > b))
    }

    pub fn fragments(&self) -> usize {
        self.counts.len().checked_div(self.sites).unwrap_or(0)
    }
}

/// Index of the first element that no later element beats.
pub(crate) fn argmax_by<T>(xs: &[T], greater: impl Fn(&T, &T) -> bool) -> usize {
    let mut best = 0;
    for (i, x) in xs.iter().enumerate().skip(1) {
        if greater(x, &xs[best]) {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AccessEvent {
    pub step: u64,
    pub fragment: FragmentId,
    pub requester: SiteId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MigrationDecision {
    Stay,
    Move { fragment: FragmentId, dest: SiteId },
}

impl MigrationDecision {
    pub fn is_move(&self) -> bool {
        matches!(self, MigrationDecision::Move { .. })
    }

    pub fn dest(&self) -> Option<SiteId> {
        match self {
            MigrationDecision::Stay => None,
            MigrationDecision::Move { dest, .. } => Some(*dest),
        }
    }
}

/// Why a policy decided what it decided; written to the decision log.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriggerReason {
    LocalAccess,
    NotDominant,
    Dominance,
    BelowThreshold,
    ThresholdExceeded,
    OwnerIsTarget,
    AwaitingWindow,
    GapTooSmall,
    Inhibited,
    FuzzyMigrate,
}

impl TriggerReason {
    pub fn as_str(self) -> &'static str {
        match self {
            TriggerReason::LocalAccess => "local",
            TriggerReason::NotDominant => "not-dominant",
            TriggerReason::Dominance => "dominance",
            TriggerReason::BelowThreshold => "below-threshold",
            TriggerReason::ThresholdExceeded => "threshold-exceeded",
            TriggerReason::OwnerIsTarget => "owner-is-target",
            TriggerReason::AwaitingWindow => "awaiting-window",
            TriggerReason::GapTooSmall => "gap-too-small",
            TriggerReason::Inhibited => "inhibited",
            TriggerReason::FuzzyMigrate => "fuzzy-migrate",
        }
    }
}

impl fmt::Display for TriggerReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A policy's answer to one access.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    pub action: MigrationDecision,
    pub reason: TriggerReason,
    /// Site the policy is steering toward (NNA/FNA argmax), when one was computed.
    pub target: Option<SiteId>,
    /// Oscillation inhibition score, FNA evaluations only.
    pub inhibition: Option<f64>,
}

impl Decision {
    pub fn stay(reason: TriggerReason) -> Self {
        Decision {
            action: MigrationDecision::Stay,
            reason,
            target: None,
            inhibition: None,
        }
    }

    pub fn moving(fragment: FragmentId, dest: SiteId, reason: TriggerReason) -> Self {
        Decision {
            action: MigrationDecision::Move { fragment, dest },
            reason,
            target: None,
            inhibition: None,
        }
    }

    pub fn with_target(mut self, target: SiteId) -> Self {
        self.target = Some(target);
        self
    }

    pub fn with_inhibition(mut self, inhibition: f64) -> Self {
        self.inhibition = Some(inhibition);
        self
    }
}

/// Uniform interface implemented by every migration algorithm.
///
/// `on_access` mutates the policy's own counters and returns a decision; it
/// never touches the placement. The caller applies moves through
/// [`apply_migration`], which gives the policy a chance to carry or reset
/// per-fragment state.
pub trait AllocationPolicy {
    fn name(&self) -> &'static str;

    fn on_access<W: Scalar>(
        &mut self,
        placement: &Placement,
        topo: &Topology<W>,
        ev: &AccessEvent,
    ) -> Result<Decision, AllocationError>;

    fn on_migrated(&mut self, fragment: FragmentId, from: SiteId, to: SiteId);
}

/// Applies a `Move` to the placement and lets the policy carry its state.
/// Returns the `(from, to)` pair, or `None` for `Stay`.
pub fn apply_migration<P: AllocationPolicy>(
    placement: &mut Placement,
    decision: MigrationDecision,
    policy: &mut P,
) -> Result<Option<(SiteId, SiteId)>, AllocationError> {
    let MigrationDecision::Move { fragment, dest } = decision else {
        return Ok(None);
    };
    let owner = placement.owner(fragment)?;
    if owner == dest {
        return Err(AllocationError::DestEqualsOwner { fragment, owner });
    }
    placement.set_owner(fragment, dest);
    policy.on_migrated(fragment, owner, dest);
    Ok(Some((owner, dest)))
}
