//! Lloyd's k-means with k-means++ seeding.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::random::substream;

pub const KMEANS_TOL: f64 = 1e-8;
pub const KMEANS_MAX_ITERS: usize = 300;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KMeansResult {
    pub assignments: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    pub inertia: f64,
    pub iterations: usize,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(p: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    centroids
        .iter()
        .enumerate()
        .map(|(c, m)| (c, sq_dist(p, m)))
        .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
}

fn distinct_count(points: &[Vec<f64>], cap: usize) -> usize {
    let mut seen: Vec<&Vec<f64>> = Vec::new();
    for p in points {
        if !seen.contains(&p) {
            seen.push(p);
            if seen.len() >= cap {
                break;
            }
        }
    }
    seen.len()
}

fn plus_plus<R: Rng>(points: &[Vec<f64>], k: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let mut centroids = vec![points[rng.gen_range(0..points.len())].clone()];
    let mut d2: Vec<f64> = points.iter().map(|p| sq_dist(p, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let mut target = rng.gen::<f64>() * total;
        let mut pick = d2.iter().rposition(|&d| d > 0.0).expect("enough distinct points");
        for (i, &d) in d2.iter().enumerate() {
            if d > 0.0 && target < d {
                pick = i;
                break;
            }
            target -= d;
        }
        let c = points[pick].clone();
        for (i, p) in points.iter().enumerate() {
            d2[i] = d2[i].min(sq_dist(p, &c));
        }
        centroids.push(c);
    }
    centroids
}

fn lloyd<R: Rng>(points: &[Vec<f64>], k: usize, rng: &mut R) -> KMeansResult {
    let d = points[0].len();
    let mut centroids = plus_plus(points, k, rng);
    let mut assignments = vec![0; points.len()];
    let mut previous = f64::INFINITY;
    let mut iterations = 0;
    loop {
        let mut inertia = 0.0;
        let mut dists = vec![0.0; points.len()];
        for (i, p) in points.iter().enumerate() {
            let (c, dist) = nearest(p, &centroids);
            assignments[i] = c;
            dists[i] = dist;
            inertia += dist;
        }
        assert!(
            inertia <= previous * (1.0 + 1e-12) + 1e-300,
            "k-means inertia rose from {previous} to {inertia}"
        );
        previous = inertia;
        if iterations == KMEANS_MAX_ITERS {
            break;
        }
        iterations += 1;

        let mut sums = vec![vec![0.0; d]; k];
        let mut counts = vec![0usize; k];
        for (p, &c) in points.iter().zip(&assignments) {
            counts[c] += 1;
            sums[c].iter_mut().zip(p).for_each(|(s, x)| *s += x);
        }
        let mut movement: f64 = 0.0;
        for c in 0..k {
            let next = if counts[c] == 0 {
                // empty cluster takes over the worst-served point
                let far = (0..points.len())
                    .max_by(|&a, &b| dists[a].total_cmp(&dists[b]))
                    .expect("nonempty");
                dists[far] = 0.0;
                points[far].clone()
            } else {
                sums[c].iter().map(|s| s / counts[c] as f64).collect()
            };
            movement = movement.max(sq_dist(&next, &centroids[c]).sqrt());
            centroids[c] = next;
        }
        if movement < KMEANS_TOL {
            // final assignment pass against the settled centroids
            let mut inertia = 0.0;
            for (i, p) in points.iter().enumerate() {
                let (c, dist) = nearest(p, &centroids);
                assignments[i] = c;
                inertia += dist;
            }
            previous = inertia.min(previous);
            break;
        }
    }
    KMeansResult {
        assignments,
        centroids,
        inertia: previous,
        iterations,
    }
}

/// Best of `restarts` seeded k-means runs by inertia. Restart `i` draws from
/// its own stream of `seed`, so the result does not depend on scheduling.
pub fn kmeans(
    points: &[Vec<f64>],
    k: usize,
    seed: u64,
    restarts: usize,
) -> Result<KMeansResult, EvalError> {
    let d = points.first().map_or(0, Vec::len);
    if d == 0 || k == 0 || points.iter().any(|p| p.len() != d) {
        return Err(EvalError::DegenerateInput(format!(
            "need k >= 1 and points of one positive dimension, got k={k}, d={d}"
        )));
    }
    if points.iter().flatten().any(|x| !x.is_finite()) {
        return Err(EvalError::DegenerateInput("non-finite coordinate".into()));
    }
    let distinct = distinct_count(points, k);
    if distinct < k {
        return Err(EvalError::DegenerateInput(format!(
            "k={k} exceeds the {distinct} distinct points"
        )));
    }
    let runs: Vec<KMeansResult> = (0..restarts.max(1) as u64)
        .into_par_iter()
        .map(|i| lloyd(points, k, &mut substream(seed, i)))
        .collect();
    Ok(runs
        .into_iter()
        .reduce(|best, r| if r.inertia < best.inertia { r } else { best })
        .expect("at least one restart"))
}
