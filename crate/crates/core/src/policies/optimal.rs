use crate::allocation::{
    AccessEvent, AllocationError, AllocationPolicy, CounterMatrix, Decision, FragmentId, Placement,
    TriggerReason,
};
use crate::num::Scalar;
use crate::topology::{SiteId, Topology};

/// Access-counter algorithm: ownership goes to whichever site has strictly
/// more recorded accesses than the current owner. The counter row stays with
/// the fragment across migrations.
#[derive(Debug, Clone)]
pub struct OptimalPolicy {
    pub counters: CounterMatrix,
}

impl OptimalPolicy {
    pub fn new(fragments: usize, sites: usize, counter_cap: Option<u64>) -> Self {
        OptimalPolicy {
            counters: CounterMatrix::new(fragments, sites, counter_cap),
        }
    }
}

pub(crate) fn check_requester<W: Scalar>(
    topo: &Topology<W>,
    ev: &AccessEvent,
) -> Result<(), AllocationError> {
    if topo.contains(ev.requester) {
        Ok(())
    } else {
        Err(AllocationError::UnknownSite(ev.requester))
    }
}

impl AllocationPolicy for OptimalPolicy {
    fn name(&self) -> &'static str {
        "optimal"
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
        if mine > self.counters.get(ev.fragment, owner) {
            Ok(Decision::moving(
                ev.fragment,
                ev.requester,
                TriggerReason::Dominance,
            ))
        } else {
            Ok(Decision::stay(TriggerReason::NotDominant))
        }
    }

    fn on_migrated(&mut self, _fragment: FragmentId, _from: SiteId, _to: SiteId) {}
}
