//! Seeded random graph generators.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stream `index` derived from `seed`, for per-task RNGs.
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(index);
    r
}

/// Erdős–Rényi `G(n, p)`.
pub fn gnp<R: Rng>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, &edges).expect("generated pairs are distinct")
}

/// `G(n, p)` conditioned on having at least one edge. Requires `n >= 2`, `p > 0`.
pub fn gnp_with_edges<R: Rng>(n: usize, p: f64, rng: &mut R) -> Graph {
    assert!(n >= 2 && p > 0.0);
    loop {
        let g = gnp(n, p, rng);
        if g.edge_count() > 0 {
            return g;
        }
    }
}

/// Sparse random graph with about `avg_degree * n / 2` edges, endpoints
/// uniform, no self-loops or duplicates.
pub fn sparse_random<R: Rng>(n: usize, avg_degree: f64, rng: &mut R) -> Graph {
    assert!(n >= 2);
    let max_edges = n * (n - 1) / 2;
    let target = ((avg_degree * n as f64 / 2.0).round() as usize).min(max_edges);
    let mut seen = HashSet::with_capacity(target);
    let mut edges = Vec::with_capacity(target);
    while edges.len() < target {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v {
            continue;
        }
        let key = (u.min(v), u.max(v));
        if seen.insert(key) {
            edges.push(key);
        }
    }
    Graph::new(n, &edges).expect("deduplicated")
}

pub fn permutation<R: Rng>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}
