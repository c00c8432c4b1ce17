//! Role-discovery evaluation: clustering quality against known roles and
//! supervised role classification over repeated stratified splits.

pub mod kmeans;
pub mod logistic;
pub mod metrics;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embed::standardize_columns;
use crate::random::substream;

pub use kmeans::{kmeans, KMeansResult};
pub use logistic::{fit as fit_logistic, LogisticConfig, LogisticModel};
pub use metrics::{accuracy, f1_macro, homogeneity_completeness, silhouette};

pub const DEFAULT_SPLITS: usize = 10;
pub const TEST_FRACTION: f64 = 0.2;
pub const DEFAULT_RESTARTS: usize = 10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("no samples")]
    Empty,
    #[error("degenerate k-means input: {0}")]
    DegenerateInput(String),
    #[error("silhouette needs at least two clusters")]
    SingleCluster,
    #[error("class {class} has {count} samples; at least 2 needed")]
    DegenerateClass { class: usize, count: usize },
    #[error("need at least {needed} samples and 2 classes, got {samples} samples in {classes} classes")]
    TooFewSamples {
        needed: usize,
        samples: usize,
        classes: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    /// Population standard deviation.
    pub fn of(values: &[f64]) -> Summary {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        Summary {
            mean,
            std: var.sqrt(),
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteringReport {
    pub homogeneity: f64,
    pub completeness: f64,
    pub silhouette: f64,
    pub k: usize,
    pub inertia: f64,
    pub assignments: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub accuracy: Summary,
    pub f1_macro: Summary,
    pub split_accuracy: Vec<f64>,
    pub split_f1_macro: Vec<f64>,
}

/// Relabels to `0..classes` in sorted order of the original ids.
fn dense_labels(labels: &[usize]) -> (Vec<usize>, usize) {
    let mut ids = labels.to_vec();
    ids.sort_unstable();
    ids.dedup();
    let dense = labels
        .iter()
        .map(|l| ids.binary_search(l).expect("present"))
        .collect();
    (dense, ids.len())
}

/// Z-scored copy of `points`.
pub fn standardized(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut rows = points.to_vec();
    standardize_columns(&mut rows);
    rows
}

/// k-means with `k` = number of true classes on z-scored points, scored
/// against `labels`.
pub fn cluster_roles(
    points: &[Vec<f64>],
    labels: &[usize],
    seed: u64,
    restarts: usize,
) -> Result<ClusteringReport, EvalError> {
    if points.len() != labels.len() {
        return Err(EvalError::LengthMismatch(points.len(), labels.len()));
    }
    let (_, k) = dense_labels(labels);
    let z = standardized(points);
    let km = kmeans(&z, k, seed, restarts)?;
    let (homogeneity, completeness) = homogeneity_completeness(labels, &km.assignments)?;
    let silhouette = silhouette(&z, &km.assignments)?;
    Ok(ClusteringReport {
        homogeneity,
        completeness,
        silhouette,
        k,
        inertia: km.inertia,
        assignments: km.assignments,
    })
}

/// Stratified split: about [`TEST_FRACTION`] of every class is held out,
/// at least one sample and never all of them.
fn stratified_split(labels: &[usize], classes: usize, seed: u64, index: u64) -> (Vec<usize>, Vec<usize>) {
    let mut rng = substream(seed, index);
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for c in 0..classes {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == c).collect();
        members.shuffle(&mut rng);
        let held = ((members.len() as f64 * TEST_FRACTION).round() as usize).clamp(1, members.len() - 1);
        test.extend_from_slice(&members[..held]);
        train.extend_from_slice(&members[held..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    (train, test)
}

fn column_stats(rows: &[Vec<f64>]) -> Vec<(f64, f64)> {
    let d = rows[0].len();
    let n = rows.len() as f64;
    (0..d)
        .map(|j| {
            let mean = rows.iter().map(|r| r[j]).sum::<f64>() / n;
            let var = rows.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / n;
            (mean, var.sqrt())
        })
        .collect()
}

fn apply_stats(row: &[f64], stats: &[(f64, f64)]) -> Vec<f64> {
    row.iter()
        .zip(stats)
        .map(|(x, &(m, s))| if s > 0.0 { (x - m) / s } else { 0.0 })
        .collect()
}

/// Logistic regression over [`DEFAULT_SPLITS`] seeded stratified 80/20
/// splits. Features are z-scored with training-split statistics.
pub fn classify_roles(
    points: &[Vec<f64>],
    labels: &[usize],
    seed: u64,
) -> Result<ClassificationReport, EvalError> {
    classify_roles_with(points, labels, seed, DEFAULT_SPLITS, &LogisticConfig::default())
}

pub fn classify_roles_with(
    points: &[Vec<f64>],
    labels: &[usize],
    seed: u64,
    splits: usize,
    cfg: &LogisticConfig,
) -> Result<ClassificationReport, EvalError> {
    if points.len() != labels.len() {
        return Err(EvalError::LengthMismatch(points.len(), labels.len()));
    }
    let (dense, classes) = dense_labels(labels);
    if points.len() < 10 || classes < 2 {
        return Err(EvalError::TooFewSamples {
            needed: 10,
            samples: points.len(),
            classes,
        });
    }
    let mut counts = vec![0usize; classes];
    dense.iter().for_each(|&c| counts[c] += 1);
    let (sorted_ids, _) = {
        let mut ids = labels.to_vec();
        ids.sort_unstable();
        ids.dedup();
        (ids, ())
    };
    if let Some(c) = (0..classes).find(|&c| counts[c] < 2) {
        return Err(EvalError::DegenerateClass {
            class: sorted_ids[c],
            count: counts[c],
        });
    }

    let scores: Vec<(f64, f64)> = (0..splits.max(1) as u64)
        .into_par_iter()
        .map(|s| {
            let (train, test) = stratified_split(&dense, classes, seed, s);
            let raw: Vec<Vec<f64>> = train.iter().map(|&i| points[i].clone()).collect();
            let stats = column_stats(&raw);
            let xs: Vec<Vec<f64>> = raw.iter().map(|r| apply_stats(r, &stats)).collect();
            let ys: Vec<usize> = train.iter().map(|&i| dense[i]).collect();
            let model = fit_logistic(&xs, &ys, classes, cfg);
            let truth: Vec<usize> = test.iter().map(|&i| dense[i]).collect();
            let pred: Vec<usize> = test
                .iter()
                .map(|&i| model.predict(&apply_stats(&points[i], &stats)))
                .collect();
            (
                accuracy(&truth, &pred).expect("nonempty test split"),
                f1_macro(&truth, &pred).expect("nonempty test split"),
            )
        })
        .collect();
    let split_accuracy: Vec<f64> = scores.iter().map(|s| s.0).collect();
    let split_f1_macro: Vec<f64> = scores.iter().map(|s| s.1).collect();
    Ok(ClassificationReport {
        accuracy: Summary::of(&split_accuracy),
        f1_macro: Summary::of(&split_f1_macro),
        split_accuracy,
        split_f1_macro,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoleReport {
    pub clustering: ClusteringReport,
    pub classification: ClassificationReport,
}

pub fn evaluate_roles(points: &[Vec<f64>], labels: &[usize], seed: u64) -> Result<RoleReport, EvalError> {
    Ok(RoleReport {
        clustering: cluster_roles(points, labels, seed, DEFAULT_RESTARTS)?,
        classification: classify_roles(points, labels, seed)?,
    })
}

impl RoleReport {
    pub fn metrics(&self) -> [f64; 5] {
        [
            self.clustering.homogeneity,
            self.clustering.completeness,
            self.clustering.silhouette,
            self.classification.accuracy.mean,
            self.classification.f1_macro.mean,
        ]
    }
}

pub const METRIC_NAMES: [&str; 5] = ["Homogeneity", "Completeness", "Silhouette", "Accuracy", "F1-score"];

/// Aligned plain-text table, one row per labelled metric vector.
pub fn format_table(rows: &[(String, [f64; 5])]) -> String {
    let label_width = rows.iter().map(|(l, _)| l.len()).max().unwrap_or(0).max(7);
    let mut out = format!("{:<label_width$}", "Dataset");
    for name in METRIC_NAMES {
        out.push_str(&format!("  {name:>12}"));
    }
    out.push('\n');
    for (label, values) in rows {
        out.push_str(&format!("{label:<label_width$}"));
        for v in values {
            out.push_str(&format!("  {v:>12.3}"));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::rng;
    use rand::Rng;

    #[test]
    fn split_is_stratified_and_disjoint() {
        let labels: Vec<usize> = (0..50).map(|i| i % 3).collect();
        let (train, test) = stratified_split(&labels, 3, 4, 0);
        assert_eq!(train.len() + test.len(), 50);
        assert!(train.iter().all(|i| test.binary_search(i).is_err()));
        for c in 0..3 {
            assert!(test.iter().any(|&i| labels[i] == c));
        }
    }

    #[test]
    fn separable_blobs_classify_perfectly() {
        let mut r = rng(3);
        let mut pts = Vec::new();
        let mut labels = Vec::new();
        for i in 0..60 {
            let c = i % 2;
            pts.push(vec![10.0 * c as f64 + r.gen::<f64>(), r.gen::<f64>()]);
            labels.push(c * 7);
        }
        let rep = classify_roles(&pts, &labels, 1).unwrap();
        assert_eq!(rep.accuracy.mean, 1.0);
        assert_eq!(rep.f1_macro.mean, 1.0);
    }

    #[test]
    fn degenerate_class() {
        let pts: Vec<Vec<f64>> = (0..12).map(|i| vec![i as f64]).collect();
        let mut labels = vec![0; 12];
        labels[5] = 3;
        assert_eq!(
            classify_roles(&pts, &labels, 0),
            Err(EvalError::DegenerateClass { class: 3, count: 1 })
        );
    }

    #[test]
    fn table_has_header_and_rows() {
        let t = format_table(&[("basic-house".into(), [1.0, 0.5, 0.25, 0.9, 0.8])]);
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].contains("Completeness"));
        assert!(lines[1].starts_with("basic-house"));
        assert!(lines[1].contains("0.500"));
    }
}
