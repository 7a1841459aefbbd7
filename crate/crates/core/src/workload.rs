//! Reproducible access streams.
//!
//! Each step, every fragment independently emits an access with probability
//! `rate`; the requester is drawn by inverse CDF from the fragment's
//! probability vector restricted to the active sites. All randomness comes
//! from one ChaCha8 stream seeded with `seed_from_u64`, whose output is fixed
//! across platforms and releases of `rand_chacha` 0.3.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::allocation::{AccessEvent, FragmentId};
use crate::topology::SiteId;

const SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WorkloadError {
    #[error("invalid probability {name} = {value}")]
    InvalidProbability { name: String, value: f64 },
    #[error("probability vector for fragment {fragment} sums to {sum}, expected 1")]
    NotNormalized { fragment: usize, sum: f64 },
    #[error("probability vector for fragment {fragment} has {len} entries for {n} sites")]
    DimensionMismatch {
        fragment: usize,
        len: usize,
        n: usize,
    },
    #[error("at least two sites are needed, got {0}")]
    TooFewSites(usize),
    #[error("site {site} out of range for {n} sites")]
    SiteOutOfRange { site: usize, n: usize },
    #[error("active site set is empty")]
    EmptyActiveSet,
    #[error("active sites carry no probability mass for fragment {0}")]
    ZeroActiveMass(usize),
    #[error("rate must lie in (0, 1], got {0}")]
    InvalidRate(f64),
    #[error("oscillation period must be at least 1")]
    InvalidPeriod,
}

/// Hot-site swap between `a` and `b` every `period` emitted events.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Oscillation {
    pub a: SiteId,
    pub b: SiteId,
    pub period: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorkloadSpec {
    pub n: usize,
    /// One probability vector over sites per fragment.
    pub probs: Vec<Vec<f64>>,
    pub rate: f64,
    /// Sites allowed to issue accesses, ascending.
    pub active: Vec<SiteId>,
    pub seed: u64,
    pub oscillation: Option<Oscillation>,
}

impl WorkloadSpec {
    /// Every fragment shares `probs`; all sites active; one access per step.
    pub fn uniform_rate(n: usize, fragments: usize, probs: Vec<f64>, seed: u64) -> Self {
        WorkloadSpec {
            n,
            probs: vec![probs; fragments],
            rate: 1.0,
            active: (0..n).map(SiteId).collect(),
            seed,
            oscillation: None,
        }
    }

    pub fn validate(&self) -> Result<(), WorkloadError> {
        for (f, p) in self.probs.iter().enumerate() {
            if p.len() != self.n {
                return Err(WorkloadError::DimensionMismatch {
                    fragment: f,
                    len: p.len(),
                    n: self.n,
                });
            }
            for (s, &v) in p.iter().enumerate() {
                if !(0.0..=1.0).contains(&v) {
                    return Err(WorkloadError::InvalidProbability {
                        name: format!("probs[{f}][{s}]"),
                        value: v,
                    });
                }
            }
            let sum: f64 = p.iter().sum();
            if (sum - 1.0).abs() > SUM_TOLERANCE {
                return Err(WorkloadError::NotNormalized { fragment: f, sum });
            }
        }
        if !(self.rate > 0.0 && self.rate <= 1.0) {
            return Err(WorkloadError::InvalidRate(self.rate));
        }
        if self.active.is_empty() {
            return Err(WorkloadError::EmptyActiveSet);
        }
        for s in &self.active {
            if s.0 >= self.n {
                return Err(WorkloadError::SiteOutOfRange {
                    site: s.0,
                    n: self.n,
                });
            }
        }
        if let Some(o) = self.oscillation {
            if o.period == 0 {
                return Err(WorkloadError::InvalidPeriod);
            }
            for s in [o.a, o.b] {
                if s.0 >= self.n {
                    return Err(WorkloadError::SiteOutOfRange {
                        site: s.0,
                        n: self.n,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Two-level vector: `x_s` at `hot`, `(1 - x_s) / (n - 1)` everywhere else.
pub fn symmetric_spec(n: usize, x_s: f64, hot: SiteId) -> Result<Vec<f64>, WorkloadError> {
    if n < 2 {
        return Err(WorkloadError::TooFewSites(n));
    }
    if !(0.0..=1.0).contains(&x_s) {
        return Err(WorkloadError::InvalidProbability {
            name: "x_s".into(),
            value: x_s,
        });
    }
    if hot.0 >= n {
        return Err(WorkloadError::SiteOutOfRange { site: hot.0, n });
    }
    let x_d = (1.0 - x_s) / (n - 1) as f64;
    let mut v = vec![x_d; n];
    v[hot.0] = x_s;
    Ok(v)
}

/// Cumulative table over the active sites with positive mass.
#[derive(Debug, Clone)]
struct Cdf {
    sites: Vec<SiteId>,
    cumulative: Vec<f64>,
}

impl Cdf {
    fn new(probs: &[f64], active: &[SiteId]) -> Option<Cdf> {
        let mut sites = Vec::new();
        let mut cumulative = Vec::new();
        let mut acc = 0.0;
        for &s in active {
            let p = probs[s.0];
            if p > 0.0 {
                acc += p;
                sites.push(s);
                cumulative.push(acc);
            }
        }
        if sites.is_empty() {
            None
        } else {
            Some(Cdf { sites, cumulative })
        }
    }

    fn total(&self) -> f64 {
        *self.cumulative.last().expect("non-empty table")
    }

    fn sample(&self, u: f64) -> SiteId {
        let target = u * self.total();
        let idx = self.cumulative.partition_point(|&c| c <= target);
        self.sites[idx.min(self.sites.len() - 1)]
    }
}

/// Renormalized requester distribution for one fragment: ratios among the
/// active sites are preserved, inactive sites get zero.
pub fn active_distribution(probs: &[f64], active: &[SiteId]) -> Vec<f64> {
    let total: f64 = active.iter().map(|s| probs[s.0]).sum();
    let mut out = vec![0.0; probs.len()];
    if total > 0.0 {
        for s in active {
            out[s.0] = probs[s.0] / total;
        }
    }
    out
}

/// Stateful event source for one simulation run.
#[derive(Debug, Clone)]
pub struct WorkloadStream {
    rng: ChaCha8Rng,
    rate: f64,
    period: Option<u64>,
    /// `tables[f][0]` is the base distribution, `tables[f][1]` the swapped one.
    tables: Vec<[Cdf; 2]>,
    emitted: Vec<u64>,
}

impl WorkloadStream {
    pub fn new(spec: &WorkloadSpec) -> Result<Self, WorkloadError> {
        spec.validate()?;
        let mut active = spec.active.clone();
        active.sort();
        active.dedup();
        let mut tables = Vec::with_capacity(spec.probs.len());
        for (f, probs) in spec.probs.iter().enumerate() {
            let base = Cdf::new(probs, &active).ok_or(WorkloadError::ZeroActiveMass(f))?;
            let swapped = match spec.oscillation {
                Some(o) => {
                    let mut p = probs.clone();
                    p.swap(o.a.0, o.b.0);
                    Cdf::new(&p, &active).ok_or(WorkloadError::ZeroActiveMass(f))?
                }
                None => base.clone(),
            };
            tables.push([base, swapped]);
        }
        Ok(WorkloadStream {
            rng: ChaCha8Rng::seed_from_u64(spec.seed),
            rate: spec.rate,
            period: spec.oscillation.map(|o| o.period),
            emitted: vec![0; tables.len()],
            tables,
        })
    }

    pub fn fragments(&self) -> usize {
        self.tables.len()
    }

    /// Draws the next access to `fragment` at `step`, or `None` when the
    /// fragment stays idle this step. No uniform is spent on the emission
    /// test when `rate == 1`.
    pub fn next_event(&mut self, step: u64, fragment: FragmentId) -> Option<AccessEvent> {
        if self.rate < 1.0 && self.rng.gen::<f64>() >= self.rate {
            return None;
        }
        let count = &mut self.emitted[fragment.0];
        let phase = match self.period {
            Some(p) => ((*count / p) % 2) as usize,
            None => 0,
        };
        *count += 1;
        let u: f64 = self.rng.gen();
        let requester = self.tables[fragment.0][phase].sample(u);
        Some(AccessEvent {
            step,
            fragment,
            requester,
        })
    }
}
