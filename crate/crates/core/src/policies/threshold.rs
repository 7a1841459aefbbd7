use crate::allocation::{
    AccessEvent, AllocationError, AllocationPolicy, Decision, FragmentId, Placement, TriggerReason,
};
use crate::num::Scalar;
use crate::topology::{SiteId, Topology};

use super::optimal::check_requester;

/// One counter per fragment: consecutive remote accesses since the last local
/// access or migration. Once it exceeds `t` the fragment moves to whichever
/// site issued the access that tipped it over.
#[derive(Debug, Clone)]
pub struct ThresholdPolicy {
    pub counters: Vec<u64>,
    pub t: u64,
}

impl ThresholdPolicy {
    pub fn new(fragments: usize, t: u64) -> Self {
        ThresholdPolicy {
            counters: vec![0; fragments],
            t,
        }
    }

    pub fn counter(&self, f: FragmentId) -> u64 {
        self.counters[f.0]
    }
}

impl AllocationPolicy for ThresholdPolicy {
    fn name(&self) -> &'static str {
        "threshold"
    }

    fn on_access<W: Scalar>(
        &mut self,
        placement: &Placement,
        topo: &Topology<W>,
        ev: &AccessEvent,
    ) -> Result<Decision, AllocationError> {
        let owner = placement.owner(ev.fragment)?;
        check_requester(topo, ev)?;
        let counter = &mut self.counters[ev.fragment.0];
        if ev.requester == owner {
            *counter = 0;
            return Ok(Decision::stay(TriggerReason::LocalAccess));
        }
        *counter += 1;
        if *counter > self.t {
            *counter = 0;
            Ok(Decision::moving(
                ev.fragment,
                ev.requester,
                TriggerReason::ThresholdExceeded,
            ))
        } else {
            Ok(Decision::stay(TriggerReason::BelowThreshold))
        }
    }

    fn on_migrated(&mut self, fragment: FragmentId, _from: SiteId, _to: SiteId) {
        self.counters[fragment.0] = 0;
    }
}
