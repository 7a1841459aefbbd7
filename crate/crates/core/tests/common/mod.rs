#![allow(dead_code)]

use fragsim::{Link, SiteId, Topology};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Edge list of a connected graph: a random spanning tree plus extra edges.
#[derive(Debug, Clone)]
pub struct GraphSpec {
    pub n: usize,
    pub edges: Vec<(usize, usize, f64)>,
}

impl GraphSpec {
    pub fn build(&self) -> Topology {
        Topology::build(
            self.n,
            self.edges
                .iter()
                .map(|&(a, b, w)| Link::new(a, b, w))
                .collect(),
        )
        .expect("generated graphs are valid")
    }
}

fn assemble(n: usize, parents: &[usize], extra: &[(usize, usize)], weights: &[u32]) -> GraphSpec {
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    let mut wi = 0;
    let mut next_w = || {
        let w = weights[wi % weights.len()] as f64;
        wi += 1;
        w
    };
    for v in 1..n {
        let p = parents[v - 1] % v;
        seen.insert((p, v));
        edges.push((p, v, next_w()));
    }
    for &(a, b) in extra {
        let (a, b) = (a % n, b % n);
        let key = (a.min(b), a.max(b));
        if a != b && seen.insert(key) {
            edges.push((key.0, key.1, next_w()));
        }
    }
    GraphSpec { n, edges }
}

/// Connected graphs on 2..=max_n sites with integer weights in 1..=max_w.
pub fn graph(max_n: usize, max_w: u32) -> impl Strategy<Value = GraphSpec> {
    (2..=max_n).prop_flat_map(move |n| {
        (
            Just(n),
            prop::collection::vec(0usize..64, n - 1),
            prop::collection::vec((0usize..64, 0usize..64), 0..=n * 2),
            prop::collection::vec(1..=max_w, 1..=32),
        )
            .prop_map(|(n, parents, extra, weights)| assemble(n, &parents, &extra, &weights))
    })
}

/// Same construction driven by a seeded RNG, for tests that need a fixed set.
pub fn seeded_graph(seed: u64, n: usize, max_w: u32) -> GraphSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let parents: Vec<usize> = (0..n - 1).map(|_| rng.gen_range(0..64)).collect();
    let extra: Vec<(usize, usize)> = (0..n)
        .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
        .collect();
    let weights: Vec<u32> = (0..32).map(|_| rng.gen_range(1..=max_w)).collect();
    assemble(n, &parents, &extra, &weights)
}

/// All-pairs shortest paths by Floyd-Warshall.
pub fn floyd_warshall(g: &GraphSpec) -> Vec<Vec<f64>> {
    let n = g.n;
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for &(a, b, w) in &g.edges {
        d[a][b] = d[a][b].min(w);
        d[b][a] = d[b][a].min(w);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

/// Hop counts by breadth-first search.
pub fn bfs_hops(g: &GraphSpec, from: usize) -> Vec<usize> {
    let mut adj = vec![Vec::new(); g.n];
    for &(a, b, _) in &g.edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut dist = vec![usize::MAX; g.n];
    dist[from] = 0;
    let mut queue = std::collections::VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

pub fn sites(n: usize) -> impl Iterator<Item = SiteId> {
    (0..n).map(SiteId)
}
