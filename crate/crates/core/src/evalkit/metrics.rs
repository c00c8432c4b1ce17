//! Clustering and classification scores.

use std::collections::BTreeMap;

use super::EvalError;
use crate::entropy::shannon;

fn check_lengths(a: usize, b: usize) -> Result<(), EvalError> {
    if a != b {
        return Err(EvalError::LengthMismatch(a, b));
    }
    if a == 0 {
        return Err(EvalError::Empty);
    }
    Ok(())
}

fn distribution(counts: impl Iterator<Item = usize>, total: usize) -> Vec<f64> {
    counts.map(|c| c as f64 / total as f64).collect()
}

/// Conditional entropy `H(A | B)` in nats from a joint count table keyed by
/// `(a, b)`.
fn conditional_entropy(joint: &BTreeMap<(usize, usize), usize>, n: usize) -> f64 {
    let mut marginal_b: BTreeMap<usize, usize> = BTreeMap::new();
    for (&(_, b), &c) in joint {
        *marginal_b.entry(b).or_default() += c;
    }
    joint
        .iter()
        .map(|(&(_, b), &c)| {
            let p_ab = c as f64 / n as f64;
            -p_ab * (c as f64 / marginal_b[&b] as f64).ln()
        })
        .sum()
}

fn label_entropy(labels: &[usize]) -> f64 {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &l in labels {
        *counts.entry(l).or_default() += 1;
    }
    shannon(&distribution(counts.into_values(), labels.len()))
}

/// Homogeneity and completeness of a clustering against ground truth.
/// A score whose reference entropy is zero is defined as 1.
pub fn homogeneity_completeness(
    labels_true: &[usize],
    labels_pred: &[usize],
) -> Result<(f64, f64), EvalError> {
    check_lengths(labels_true.len(), labels_pred.len())?;
    let n = labels_true.len();
    let mut joint_tp: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut joint_pt: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (&t, &p) in labels_true.iter().zip(labels_pred) {
        *joint_tp.entry((t, p)).or_default() += 1;
        *joint_pt.entry((p, t)).or_default() += 1;
    }
    let score = |h_cond: f64, h: f64| {
        if h == 0.0 {
            1.0
        } else {
            (1.0 - h_cond / h).clamp(0.0, 1.0)
        }
    };
    let h = score(conditional_entropy(&joint_tp, n), label_entropy(labels_true));
    let c = score(conditional_entropy(&joint_pt, n), label_entropy(labels_pred));
    Ok((h, c))
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Mean silhouette coefficient with Euclidean distance. Points alone in
/// their cluster score 0.
pub fn silhouette(points: &[Vec<f64>], assignments: &[usize]) -> Result<f64, EvalError> {
    check_lengths(points.len(), assignments.len())?;
    let clusters: Vec<usize> = {
        let mut c = assignments.to_vec();
        c.sort_unstable();
        c.dedup();
        c
    };
    if clusters.len() < 2 {
        return Err(EvalError::SingleCluster);
    }
    let index = |c: usize| clusters.binary_search(&c).expect("present");
    let mut sizes = vec![0usize; clusters.len()];
    for &a in assignments {
        sizes[index(a)] += 1;
    }

    let n = points.len();
    let mut total = 0.0;
    let mut sums = vec![0.0; clusters.len()];
    for i in 0..n {
        let own = index(assignments[i]);
        if sizes[own] == 1 {
            continue;
        }
        sums.iter_mut().for_each(|s| *s = 0.0);
        for j in 0..n {
            if i != j {
                sums[index(assignments[j])] += euclidean(&points[i], &points[j]);
            }
        }
        let a = sums[own] / (sizes[own] - 1) as f64;
        let b = (0..clusters.len())
            .filter(|&c| c != own)
            .map(|c| sums[c] / sizes[c] as f64)
            .fold(f64::INFINITY, f64::min);
        let denom = a.max(b);
        if denom > 0.0 {
            total += (b - a) / denom;
        }
    }
    Ok(total / n as f64)
}

pub fn accuracy(labels_true: &[usize], labels_pred: &[usize]) -> Result<f64, EvalError> {
    check_lengths(labels_true.len(), labels_pred.len())?;
    let hits = labels_true.iter().zip(labels_pred).filter(|(a, b)| a == b).count();
    Ok(hits as f64 / labels_true.len() as f64)
}

/// Unweighted mean of per-class F1 over every class that occurs in either
/// labelling. Classes never predicted score 0.
pub fn f1_macro(labels_true: &[usize], labels_pred: &[usize]) -> Result<f64, EvalError> {
    check_lengths(labels_true.len(), labels_pred.len())?;
    let mut classes: Vec<usize> = labels_true.iter().chain(labels_pred).copied().collect();
    classes.sort_unstable();
    classes.dedup();
    let sum: f64 = classes
        .iter()
        .map(|&c| {
            let tp = labels_true
                .iter()
                .zip(labels_pred)
                .filter(|&(&t, &p)| t == c && p == c)
                .count();
            let actual = labels_true.iter().filter(|&&t| t == c).count();
            let predicted = labels_pred.iter().filter(|&&p| p == c).count();
            if tp == 0 {
                0.0
            } else {
                2.0 * tp as f64 / (actual + predicted) as f64
            }
        })
        .sum();
    Ok(sum / classes.len() as f64)
}
