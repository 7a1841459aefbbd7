//! Step-indexed simulation loop and its metrics.

use thiserror::Error;

use crate::allocation::{
    apply_migration, AllocationError, AllocationPolicy, FragmentId, MigrationDecision, Placement,
    TriggerReason,
};
use crate::num::Scalar;
use crate::policies::PolicyConfig;
use crate::topology::{SiteId, Topology};
use crate::workload::{WorkloadError, WorkloadSpec, WorkloadStream};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Workload(#[from] WorkloadError),
    #[error(transparent)]
    Allocation(#[from] AllocationError),
    #[error("no accesses were processed")]
    NoAccesses,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FragmentSpec {
    pub size: f64,
    pub owner: SiteId,
}

/// Which decisions end up in [`SimMetrics::decision_log`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DecisionLogMode {
    /// Only migrations; enough to reconstruct ownership chains.
    #[default]
    MovesOnly,
    All,
}

#[derive(Debug, Clone)]
pub struct SimConfig<W = f64> {
    pub topology: Topology<W>,
    pub fragments: Vec<FragmentSpec>,
    pub policy: PolicyConfig,
    pub workload: WorkloadSpec,
    pub num_steps: u64,
    /// Site whose residency share is reported as `o_s_hat`.
    pub designated: SiteId,
    pub per_hop_latency: f64,
    /// Accesses that arrive while their fragment is in flight wait for it.
    pub migration_blocking: bool,
    pub log_mode: DecisionLogMode,
}

impl<W: Scalar> SimConfig<W> {
    pub fn validate(&self) -> Result<(), SimError> {
        let n = self.topology.n();
        let bad = |msg: String| Err(SimError::InvalidConfig(msg));
        if self.num_steps == 0 {
            return bad("num_steps must be at least 1".into());
        }
        if self.fragments.is_empty() {
            return bad("at least one fragment is required".into());
        }
        for (i, f) in self.fragments.iter().enumerate() {
            if !(f.size > 0.0 && f.size.is_finite()) {
                return bad(format!("fragments[{i}].size must be positive"));
            }
            if f.owner.0 >= n {
                return bad(format!("fragments[{i}].owner {} is not a site", f.owner));
            }
        }
        if self.designated.0 >= n {
            return bad(format!("designated site {} is not a site", self.designated));
        }
        if !(self.per_hop_latency > 0.0 && self.per_hop_latency.is_finite()) {
            return bad("per_hop_latency must be positive".into());
        }
        if self.workload.n != n {
            return bad(format!(
                "workload covers {} sites but the topology has {n}",
                self.workload.n
            ));
        }
        if self.workload.probs.len() != self.fragments.len() {
            return bad(format!(
                "workload has {} probability vectors for {} fragments",
                self.workload.probs.len(),
                self.fragments.len()
            ));
        }
        self.policy.validate().map_err(SimError::InvalidConfig)?;
        self.workload.validate()?;
        Ok(())
    }
}

/// One decision-log line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecisionRecord {
    pub step: u64,
    pub fragment: FragmentId,
    pub requester: SiteId,
    pub owner_before: SiteId,
    pub decision: MigrationDecision,
    pub reason: TriggerReason,
    /// Decision-time steering target of NNA/FNA. Not part of the CSV.
    pub target: Option<SiteId>,
    pub inhibition: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimMetrics {
    pub accesses_total: u64,
    /// Accesses processed while the fragment sat at each site.
    pub residency: Vec<u64>,
    pub designated: SiteId,
    pub o_s_hat: f64,
    pub migrations: u64,
    pub migration_hop_cost: f64,
    pub response_cost: f64,
    pub avg_move_time: f64,
    pub decision_log: Vec<DecisionRecord>,
    pub final_placement: Placement,
}

pub fn estimate_os(m: &SimMetrics, site: SiteId) -> Result<f64, SimError> {
    if m.accesses_total == 0 {
        return Err(SimError::NoAccesses);
    }
    Ok(m.residency[site.0] as f64 / m.accesses_total as f64)
}

/// Runs one simulation. Each step visits fragments in id order; an emitted
/// access is charged at the owner it finds, then handed to the policy, and any
/// resulting migration is applied before the next fragment is visited.
pub fn run<W: Scalar>(cfg: &SimConfig<W>) -> Result<SimMetrics, SimError> {
    cfg.validate()?;
    let topo = &cfg.topology;
    let n = topo.n();
    let mut stream = WorkloadStream::new(&cfg.workload)?;
    let mut placement = Placement::new(cfg.fragments.iter().map(|f| f.owner).collect());
    let mut policy = cfg.policy.build(cfg.fragments.len(), n);

    let dist = |a: SiteId, b: SiteId| topo.distance(a, b).to_f64_lossy();
    let mut residency = vec![0u64; n];
    let mut accesses_total = 0u64;
    let mut migrations = 0u64;
    let mut migration_hop_cost = 0.0;
    let mut response_cost = 0.0;
    let mut in_flight_until = vec![0u64; cfg.fragments.len()];
    let mut log = Vec::new();

    for step in 0..cfg.num_steps {
        for (fi, frag) in cfg.fragments.iter().enumerate() {
            let fragment = FragmentId(fi);
            let Some(ev) = stream.next_event(step, fragment) else {
                continue;
            };
            let owner = placement.owner(fragment)?;
            accesses_total += 1;
            residency[owner.0] += 1;
            response_cost += 2.0 * dist(ev.requester, owner) * cfg.per_hop_latency;
            if cfg.migration_blocking && step < in_flight_until[fi] {
                response_cost += (in_flight_until[fi] - step) as f64 * cfg.per_hop_latency;
            }

            let decision = policy.on_access(&placement, topo, &ev)?;
            if let Some((from, to)) = apply_migration(&mut placement, decision.action, &mut policy)?
            {
                let d = dist(from, to);
                migrations += 1;
                migration_hop_cost += frag.size * d * cfg.per_hop_latency;
                in_flight_until[fi] = step + (frag.size * d).ceil() as u64;
            }
            if decision.action.is_move() || cfg.log_mode == DecisionLogMode::All {
                log.push(DecisionRecord {
                    step,
                    fragment,
                    requester: ev.requester,
                    owner_before: owner,
                    decision: decision.action,
                    reason: decision.reason,
                    target: decision.target,
                    inhibition: decision.inhibition,
                });
            }
        }
    }

    let o_s_hat = if accesses_total == 0 {
        0.0
    } else {
        residency[cfg.designated.0] as f64 / accesses_total as f64
    };
    Ok(SimMetrics {
        accesses_total,
        residency,
        designated: cfg.designated,
        o_s_hat,
        migrations,
        migration_hop_cost,
        response_cost,
        avg_move_time: migration_hop_cost / migrations.max(1) as f64,
        decision_log: log,
        final_placement: placement,
    })
}
