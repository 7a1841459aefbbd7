//! Small Mamdani-style engine that turns two oscillation signals into an
//! inhibition score in `[0, 1]`.
//!
//! Inputs are the normalized change of a fragment's access-score vector over
//! the last window and an alternation indicator computed from its recent
//! migration destinations. Both are fuzzified with three triangular sets and
//! combined by min/max rules; the score is the strongest rule activation.

use std::collections::VecDeque;

use crate::topology::SiteId;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triangle {
    pub left: f64,
    pub peak: f64,
    pub right: f64,
}

impl Triangle {
    pub const fn new(left: f64, peak: f64, right: f64) -> Self {
        Triangle { left, peak, right }
    }

    pub fn membership(&self, x: f64) -> f64 {
        if x <= self.left || x >= self.right {
            0.0
        } else if x == self.peak {
            1.0
        } else if x < self.peak {
            (x - self.left) / (self.peak - self.left)
        } else {
            (self.right - x) / (self.right - self.peak)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Low,
    Medium,
    High,
}

/// Low, medium and high sets peaking at 0, 0.5 and 1 over a `[0, 1]` universe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Partition {
    pub low: Triangle,
    pub medium: Triangle,
    pub high: Triangle,
}

impl Default for Partition {
    fn default() -> Self {
        Partition {
            low: Triangle::new(-0.5, 0.0, 0.5),
            medium: Triangle::new(0.0, 0.5, 1.0),
            high: Triangle::new(0.5, 1.0, 1.5),
        }
    }
}

impl Partition {
    pub fn degree(&self, level: Level, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        match level {
            Level::Low => self.low.membership(x),
            Level::Medium => self.medium.membership(x),
            Level::High => self.high.membership(x),
        }
    }
}

/// `IF change IS .. AND alternation IS .. THEN inhibit`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rule {
    pub change: Level,
    pub alternation: Level,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InhibitionEngine {
    pub partition: Partition,
    pub rules: Vec<Rule>,
}

impl Default for InhibitionEngine {
    fn default() -> Self {
        InhibitionEngine {
            partition: Partition::default(),
            rules: vec![
                Rule {
                    change: Level::High,
                    alternation: Level::High,
                },
                Rule {
                    change: Level::High,
                    alternation: Level::Medium,
                },
                Rule {
                    change: Level::Medium,
                    alternation: Level::High,
                },
            ],
        }
    }
}

impl InhibitionEngine {
    pub fn inhibition(&self, change: f64, alternation: f64) -> f64 {
        self.rules
            .iter()
            .map(|r| {
                let m = self.partition.degree(r.change, change);
                let a = self.partition.degree(r.alternation, alternation);
                m.min(a)
            })
            .fold(0.0, f64::max)
    }
}

/// Fraction of the `capacity - 2` possible `X, Y, X` triples in the history
/// window that actually occur. A full window of back-and-forth moves gives 1.
pub fn alternation(history: &VecDeque<SiteId>, capacity: usize) -> f64 {
    if capacity < 3 {
        return 0.0;
    }
    let h: Vec<SiteId> = history.iter().copied().collect();
    let hits = (2..h.len())
        .filter(|&i| h[i] == h[i - 2] && h[i] != h[i - 1])
        .count();
    hits as f64 / (capacity - 2) as f64
}
