//! Site graph with precomputed link-state routing.
//!
//! Every site is assumed to know the whole graph, so routing reduces to one
//! all-pairs shortest-path pass at build time. Among equal-cost next hops the
//! neighbor with the smallest id wins, which keeps routing tables reproducible.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::num::Scalar;

/// Dense site index in `0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SiteId(pub usize);

impl SiteId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for SiteId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<usize> for SiteId {
    fn from(v: usize) -> Self {
        SiteId(v)
    }
}

/// Undirected weighted link.
#[derive(Debug, Clone, PartialEq)]
pub struct Link<W = f64> {
    pub a: SiteId,
    pub b: SiteId,
    pub weight: W,
}

impl<W> Link<W> {
    pub fn new(a: usize, b: usize, weight: W) -> Self {
        Link {
            a: SiteId(a),
            b: SiteId(b),
            weight,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopologyError {
    #[error("topology needs at least one site")]
    NoSites,
    #[error("link endpoint {site} out of range for {n} sites")]
    SiteOutOfRange { site: usize, n: usize },
    #[error("self loop on site {0}")]
    SelfLoop(usize),
    #[error("duplicate link between {0} and {1}")]
    DuplicateLink(usize, usize),
    #[error("link {0}-{1} has non-positive weight")]
    NonPositiveWeight(usize, usize),
    #[error("graph is disconnected: site {to} unreachable from {from}")]
    DisconnectedGraph { from: usize, to: usize },
    #[error("next hop requested from a site to itself ({0})")]
    SameSite(usize),
}

#[derive(Debug, Clone)]
pub struct Topology<W = f64> {
    n: usize,
    links: Vec<Link<W>>,
    /// `adjacency[a]` holds `(neighbor, weight)` sorted by neighbor id.
    adjacency: Vec<Vec<(SiteId, W)>>,
    dist: Vec<W>,
    next: Vec<SiteId>,
}

impl<W: Scalar> Topology<W> {
    pub fn build(n: usize, links: Vec<Link<W>>) -> Result<Self, TopologyError> {
        if n == 0 {
            return Err(TopologyError::NoSites);
        }
        let mut adjacency: Vec<Vec<(SiteId, W)>> = vec![Vec::new(); n];
        for link in &links {
            let (a, b) = (link.a.0, link.b.0);
            for site in [a, b] {
                if site >= n {
                    return Err(TopologyError::SiteOutOfRange { site, n });
                }
            }
            if a == b {
                return Err(TopologyError::SelfLoop(a));
            }
            if link.weight <= W::zero() {
                return Err(TopologyError::NonPositiveWeight(a, b));
            }
            if adjacency[a].iter().any(|(s, _)| s.0 == b) {
                return Err(TopologyError::DuplicateLink(a.min(b), a.max(b)));
            }
            adjacency[a].push((link.b, link.weight.clone()));
            adjacency[b].push((link.a, link.weight.clone()));
        }
        for row in &mut adjacency {
            row.sort_by_key(|(s, _)| *s);
        }

        let mut dist = Vec::with_capacity(n * n);
        for src in 0..n {
            let row = dijkstra(&adjacency, src);
            for (to, d) in row.into_iter().enumerate() {
                match d {
                    Some(d) => dist.push(d),
                    None => return Err(TopologyError::DisconnectedGraph { from: src, to }),
                }
            }
        }

        let mut next = vec![SiteId(0); n * n];
        for a in 0..n {
            for b in 0..n {
                if a == b {
                    next[a * n + b] = SiteId(a);
                    continue;
                }
                let target = &dist[a * n + b];
                // Adjacency rows are sorted, so the first match is the lowest id.
                let hop = adjacency[a]
                    .iter()
                    .find(|(v, w)| (w.clone() + dist[v.0 * n + b].clone()).approx_eq(target))
                    .map(|(v, _)| *v)
                    .expect("a shortest path always leaves through some neighbor");
                next[a * n + b] = hop;
            }
        }

        Ok(Topology {
            n,
            links,
            adjacency,
            dist,
            next,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn links(&self) -> &[Link<W>] {
        &self.links
    }

    pub fn neighbors(&self, site: SiteId) -> impl Iterator<Item = SiteId> + '_ {
        self.adjacency[site.0].iter().map(|(s, _)| *s)
    }

    pub fn link_weight(&self, a: SiteId, b: SiteId) -> Option<&W> {
        self.adjacency[a.0]
            .iter()
            .find(|(s, _)| *s == b)
            .map(|(_, w)| w)
    }

    pub fn contains(&self, site: SiteId) -> bool {
        site.0 < self.n
    }

    pub fn distance(&self, a: SiteId, b: SiteId) -> &W {
        &self.dist[a.0 * self.n + b.0]
    }

    pub fn next_hop(&self, from: SiteId, to: SiteId) -> Result<SiteId, TopologyError> {
        if from == to {
            return Err(TopologyError::SameSite(from.0));
        }
        Ok(self.next[from.0 * self.n + to.0])
    }

    /// Sites visited when following next hops from `from` to `to`, both ends included.
    pub fn route(&self, from: SiteId, to: SiteId) -> Vec<SiteId> {
        let mut path = vec![from];
        let mut cur = from;
        while cur != to {
            cur = self.next[cur.0 * self.n + to.0];
            path.push(cur);
        }
        path
    }
}

/// O(n^2) Dijkstra; only needs `PartialOrd`, so it also runs on exact rationals.
fn dijkstra<W: Scalar>(adjacency: &[Vec<(SiteId, W)>], src: usize) -> Vec<Option<W>> {
    let n = adjacency.len();
    let mut dist: Vec<Option<W>> = vec![None; n];
    let mut done = vec![false; n];
    dist[src] = Some(W::zero());
    loop {
        let mut pick: Option<usize> = None;
        for v in 0..n {
            if done[v] {
                continue;
            }
            if let Some(dv) = &dist[v] {
                match pick {
                    Some(p) if dist[p].as_ref().is_some_and(|dp| dp <= dv) => {}
                    _ => pick = Some(v),
                }
            }
        }
        let Some(u) = pick else { break };
        done[u] = true;
        let du = dist[u].clone().expect("picked vertex has a distance");
        for (v, w) in &adjacency[u] {
            let cand = du.clone() + w.clone();
            let better = match &dist[v.0] {
                None => true,
                Some(cur) => cand < *cur,
            };
            if better {
                dist[v.0] = Some(cand);
            }
        }
    }
    dist
}

/// Unit-weight complete graph.
pub fn complete(n: usize) -> Topology<f64> {
    let mut links = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            links.push(Link::new(a, b, 1.0));
        }
    }
    Topology::build(n, links).expect("complete graph is valid")
}

/// Unit-weight ring; a path for `n == 2` and a single site for `n == 1`.
pub fn ring(n: usize) -> Topology<f64> {
    let mut links = Vec::new();
    if n == 2 {
        links.push(Link::new(0, 1, 1.0));
    } else if n > 2 {
        for a in 0..n {
            links.push(Link::new(a, (a + 1) % n, 1.0));
        }
    }
    Topology::build(n, links).expect("ring is valid")
}
