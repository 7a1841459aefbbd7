use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::allocation::{
    argmax_by, AccessEvent, AllocationError, AllocationPolicy, Decision, FragmentId, Placement,
    TriggerReason,
};
use crate::num::Scalar;
use crate::topology::{SiteId, Topology};

use super::fuzzy::{alternation, InhibitionEngine};
use super::optimal::check_requester;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FnaParams {
    /// Accesses to a fragment between evaluations.
    pub window: u64,
    /// Per-access decay of the score vector, in `(0, 1)`.
    pub decay: f64,
    /// Length of the migration-destination history.
    pub history: usize,
    pub inhibition_cutoff: f64,
    /// Minimum normalized score lead of the target over the owner.
    pub min_gap: f64,
    pub epsilon: f64,
}

impl Default for FnaParams {
    fn default() -> Self {
        FnaParams {
            window: 20,
            decay: 0.95,
            history: 6,
            inhibition_cutoff: 0.5,
            min_gap: 0.05,
            epsilon: 1e-9,
        }
    }
}

impl FnaParams {
    pub fn validate(&self) -> Result<(), String> {
        if self.window == 0 {
            return Err("window must be at least 1".into());
        }
        if !(self.decay > 0.0 && self.decay < 1.0) {
            return Err("decay must lie in (0, 1)".into());
        }
        if !(0.0..=1.0).contains(&self.inhibition_cutoff) {
            return Err("inhibition_cutoff must lie in [0, 1]".into());
        }
        if !(self.min_gap >= 0.0 && self.min_gap.is_finite()) {
            return Err("min_gap must be non-negative".into());
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err("epsilon must be positive".into());
        }
        Ok(())
    }
}

/// Signals computed at one window evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub change: f64,
    pub alternation: f64,
    pub inhibition: f64,
    pub target: SiteId,
    pub gap: f64,
}

/// Fuzzy Neighborhood Allocation.
///
/// Keeps an exponentially decayed access-score vector per fragment. Every
/// `window` accesses it compares the vector against the snapshot from the
/// previous evaluation; a large change combined with a back-and-forth
/// migration history inhibits movement. Otherwise the fragment moves one hop
/// toward the highest-scoring site, like NNA.
#[derive(Debug, Clone)]
pub struct FnaPolicy {
    pub params: FnaParams,
    pub engine: InhibitionEngine,
    sites: usize,
    scores: Vec<f64>,
    snapshot: Vec<f64>,
    since_eval: Vec<u64>,
    history: Vec<VecDeque<SiteId>>,
    last_eval: Vec<Option<Evaluation>>,
}

impl FnaPolicy {
    pub fn new(fragments: usize, sites: usize, params: FnaParams) -> Self {
        FnaPolicy {
            params,
            engine: InhibitionEngine::default(),
            sites,
            scores: vec![0.0; fragments * sites],
            snapshot: vec![0.0; fragments * sites],
            since_eval: vec![0; fragments],
            history: vec![VecDeque::with_capacity(params.history); fragments],
            last_eval: vec![None; fragments],
        }
    }

    pub fn scores(&self, f: FragmentId) -> &[f64] {
        &self.scores[f.0 * self.sites..(f.0 + 1) * self.sites]
    }

    pub fn history(&self, f: FragmentId) -> &VecDeque<SiteId> {
        &self.history[f.0]
    }

    pub fn last_evaluation(&self, f: FragmentId) -> Option<Evaluation> {
        self.last_eval[f.0]
    }

    fn evaluate(&mut self, f: FragmentId, owner: SiteId) -> Evaluation {
        let range = f.0 * self.sites..(f.0 + 1) * self.sites;
        let current = &self.scores[range.clone()];
        let previous = &self.snapshot[range.clone()];
        let total: f64 = current.iter().sum();
        let norm = total + self.params.epsilon;
        let delta: f64 = current
            .iter()
            .zip(previous)
            .map(|(c, p)| (c - p).abs())
            .sum();
        let change = delta / norm;
        let alt = alternation(&self.history[f.0], self.params.history);
        let inhibition = self.engine.inhibition(change, alt);
        let target = SiteId(argmax_by(current, |a, b| a > b));
        let gap = (current[target.0] - current[owner.0]) / norm;
        self.snapshot[range.clone()].copy_from_slice(&self.scores[range]);
        self.since_eval[f.0] = 0;
        let eval = Evaluation {
            change,
            alternation: alt,
            inhibition,
            target,
            gap,
        };
        self.last_eval[f.0] = Some(eval);
        eval
    }
}

impl AllocationPolicy for FnaPolicy {
    fn name(&self) -> &'static str {
        "fna"
    }

    fn on_access<W: Scalar>(
        &mut self,
        placement: &Placement,
        topo: &Topology<W>,
        ev: &AccessEvent,
    ) -> Result<Decision, AllocationError> {
        let owner = placement.owner(ev.fragment)?;
        check_requester(topo, ev)?;
        let f = ev.fragment;
        let decay = self.params.decay;
        for s in &mut self.scores[f.0 * self.sites..(f.0 + 1) * self.sites] {
            *s *= decay;
        }
        self.scores[f.0 * self.sites + ev.requester.0] += 1.0;
        self.since_eval[f.0] += 1;

        // A due evaluation is deferred to the next remote access, so a local
        // access never moves the fragment.
        if ev.requester == owner {
            return Ok(Decision::stay(TriggerReason::LocalAccess));
        }
        if self.since_eval[f.0] < self.params.window {
            return Ok(Decision::stay(TriggerReason::AwaitingWindow));
        }

        let e = self.evaluate(f, owner);
        let stay = |reason| {
            Ok(Decision::stay(reason)
                .with_target(e.target)
                .with_inhibition(e.inhibition))
        };
        if e.target == owner {
            return stay(TriggerReason::OwnerIsTarget);
        }
        if e.gap < self.params.min_gap {
            return stay(TriggerReason::GapTooSmall);
        }
        if e.inhibition > self.params.inhibition_cutoff {
            return stay(TriggerReason::Inhibited);
        }
        let dest = topo.next_hop(owner, e.target)?;
        Ok(Decision::moving(f, dest, TriggerReason::FuzzyMigrate)
            .with_target(e.target)
            .with_inhibition(e.inhibition))
    }

    fn on_migrated(&mut self, fragment: FragmentId, _from: SiteId, to: SiteId) {
        let cap = self.params.history;
        if cap == 0 {
            return;
        }
        let h = &mut self.history[fragment.0];
        if h.len() == cap {
            h.pop_front();
        }
        h.push_back(to);
    }
}
