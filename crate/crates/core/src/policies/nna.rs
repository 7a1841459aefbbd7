use serde::{Deserialize, Serialize};

use crate::allocation::{
    AccessEvent, AllocationError, AllocationPolicy, CounterMatrix, Decision, FragmentId, Placement,
    TriggerReason,
};
use crate::num::Scalar;
use crate::topology::{SiteId, Topology};

use super::optimal::check_requester;

/// What makes NNA decide that a fragment should start moving.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NnaTrigger {
    /// Requester's counter strictly exceeds the owner's, as in the optimal algorithm.
    #[default]
    OptimalDominance,
    /// More than `t` remote requests since the fragment last moved.
    FixedThreshold(u64),
}

/// Near Neighborhood Allocation: triggers like the optimal algorithm but
/// moves one hop along the shortest path toward the highest-count site.
#[derive(Debug, Clone)]
pub struct NnaPolicy {
    pub counters: CounterMatrix,
    pub trigger: NnaTrigger,
    remote_since_move: Vec<u64>,
}

impl NnaPolicy {
    pub fn new(
        fragments: usize,
        sites: usize,
        trigger: NnaTrigger,
        counter_cap: Option<u64>,
    ) -> Self {
        NnaPolicy {
            counters: CounterMatrix::new(fragments, sites, counter_cap),
            trigger,
            remote_since_move: vec![0; fragments],
        }
    }
}

impl AllocationPolicy for NnaPolicy {
    fn name(&self) -> &'static str {
        "nna"
    }

    fn on_access<W: Scalar>(
        &mut self,
        placement: &Placement,
        topo: &Topology<W>,
        ev: &AccessEvent,
    ) -> Result<Decision, AllocationError> {
        let owner = placement.owner(ev.fragment)?;
        check_requester(topo, ev)?;
        let mine = self.counters.increment(ev.fragment, ev.requester);
        if ev.requester == owner {
            return Ok(Decision::stay(TriggerReason::LocalAccess));
        }
        let (fired, reason) = match self.trigger {
            NnaTrigger::OptimalDominance => (
                mine > self.counters.get(ev.fragment, owner),
                TriggerReason::Dominance,
            ),
            NnaTrigger::FixedThreshold(t) => {
                let remote = &mut self.remote_since_move[ev.fragment.0];
                *remote += 1;
                (*remote > t, TriggerReason::ThresholdExceeded)
            }
        };
        if !fired {
            let idle = match self.trigger {
                NnaTrigger::OptimalDominance => TriggerReason::NotDominant,
                NnaTrigger::FixedThreshold(_) => TriggerReason::BelowThreshold,
            };
            return Ok(Decision::stay(idle));
        }
        let target = self.counters.argmax(ev.fragment);
        if target == owner {
            return Ok(Decision::stay(TriggerReason::OwnerIsTarget).with_target(target));
        }
        let dest = topo.next_hop(owner, target)?;
        Ok(Decision::moving(ev.fragment, dest, reason).with_target(target))
    }

    fn on_migrated(&mut self, fragment: FragmentId, _from: SiteId, _to: SiteId) {
        self.remote_since_move[fragment.0] = 0;
    }
}
