//! Graph classification from node embeddings: node attributes are
//! concatenated with entropy vectors, mapped by an MLP `phi`, summed over the
//! graph, and classified by a second MLP `psi`.

pub mod mlp;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embed::{embed_graph, EmbedError, EmbeddingConfig, EmbeddingMatrix, EntropyMode};
use crate::evalkit::Summary;
use crate::graph::Graph;
use crate::random::substream;

pub use mlp::{softmax, Dense, Mlp, ReadoutModel};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReadoutError {
    #[error("attribute rows ({attributes}) and embedding rows ({embeddings}) differ")]
    RowMismatch { attributes: usize, embeddings: usize },
    #[error("shape mismatch: expected {expected} columns, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("class {class} has {count} graphs; need at least {needed}")]
    TooFewGraphs {
        class: usize,
        count: usize,
        needed: usize,
    },
    #[error("invalid training config: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Embed(#[from] EmbedError),
}

/// `X' = [X | H]`, one row per node, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl FeatureMatrix {
    pub fn row(&self, v: usize) -> &[f64] {
        &self.data[v * self.cols..(v + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[f64]> + Clone {
        (0..self.rows).map(move |v| self.row(v))
    }
}

/// Concatenates attributes `x` (all rows the same length, possibly 0) with
/// the entropy columns of `h`.
pub fn augment(x: &[Vec<f64>], h: &EmbeddingMatrix) -> Result<FeatureMatrix, ReadoutError> {
    if x.len() != h.rows {
        return Err(ReadoutError::RowMismatch {
            attributes: x.len(),
            embeddings: h.rows,
        });
    }
    let d = x.first().map_or(0, Vec::len);
    if let Some(bad) = x.iter().find(|r| r.len() != d) {
        return Err(ReadoutError::ShapeMismatch {
            expected: d,
            got: bad.len(),
        });
    }
    let mut data = Vec::with_capacity(h.rows * (d + h.cols));
    for (v, attrs) in x.iter().enumerate() {
        data.extend_from_slice(attrs);
        data.extend_from_slice(h.row(v));
    }
    Ok(FeatureMatrix {
        rows: h.rows,
        cols: d + h.cols,
        data,
    })
}

/// Per-column affine rescaling of feature columns `offset..`, fitted on
/// node rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub offset: usize,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Scaler {
    /// Population statistics over every row of every matrix. Constant
    /// columns get `std = 0` and map to 0.
    pub fn fit<'a>(matrices: impl Iterator<Item = &'a FeatureMatrix> + Clone, offset: usize) -> Scaler {
        let cols = matrices.clone().next().map_or(offset, |m| m.cols);
        let width = cols.saturating_sub(offset);
        let mut sum = vec![0.0; width];
        let mut count = 0usize;
        for m in matrices.clone() {
            for row in m.row_iter() {
                sum.iter_mut().zip(&row[offset..]).for_each(|(s, x)| *s += x);
                count += 1;
            }
        }
        let n = count.max(1) as f64;
        let mean: Vec<f64> = sum.iter().map(|s| s / n).collect();
        let mut sq = vec![0.0; width];
        for m in matrices {
            for row in m.row_iter() {
                for (j, x) in row[offset..].iter().enumerate() {
                    sq[j] += (x - mean[j]) * (x - mean[j]);
                }
            }
        }
        Scaler {
            offset,
            mean,
            std: sq.iter().map(|s| (s / n).sqrt()).collect(),
        }
    }

    pub fn apply(&self, fm: &FeatureMatrix) -> FeatureMatrix {
        let mut out = fm.clone();
        for v in 0..fm.rows {
            let row = &mut out.data[v * fm.cols..(v + 1) * fm.cols];
            for (j, x) in row[self.offset..].iter_mut().enumerate() {
                *x = if self.std[j] > 0.0 {
                    (*x - self.mean[j]) / self.std[j]
                } else {
                    0.0
                };
            }
        }
        out
    }
}

/// Class probabilities for one graph.
pub fn forward(model: &ReadoutModel, fm: &FeatureMatrix) -> Result<Vec<f64>, ReadoutError> {
    if fm.cols != model.input_dim() {
        return Err(ReadoutError::ShapeMismatch {
            expected: model.input_dim(),
            got: fm.cols,
        });
    }
    Ok(softmax(&model.logits(fm.row_iter())))
}

pub fn predict(model: &ReadoutModel, fm: &FeatureMatrix) -> Result<usize, ReadoutError> {
    let p = forward(model, fm)?;
    Ok((0..p.len())
        .max_by(|&a, &b| p[a].total_cmp(&p[b]).then(b.cmp(&a)))
        .expect("at least one class"))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Adam {
    cfg: AdamConfig,
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    pub fn new(params: usize, cfg: AdamConfig) -> Self {
        Self {
            cfg,
            m: vec![0.0; params],
            v: vec![0.0; params],
            t: 0,
        }
    }

    pub fn step(&mut self, params: &mut [f64], grad: &[f64], lr: f64) {
        self.t += 1;
        let AdamConfig { beta1, beta2, eps } = self.cfg;
        let c1 = 1.0 - beta1.powi(self.t);
        let c2 = 1.0 - beta2.powi(self.t);
        for i in 0..params.len() {
            self.m[i] = beta1 * self.m[i] + (1.0 - beta1) * grad[i];
            self.v[i] = beta2 * self.v[i] + (1.0 - beta2) * grad[i] * grad[i];
            let m_hat = self.m[i] / c1;
            let v_hat = self.v[i] / c2;
            params[i] -= lr * m_hat / (v_hat.sqrt() + eps);
        }
    }
}

/// How node attributes are formed before concatenation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum AttributeMode {
    /// Use the dataset's attributes; graphs without any fall back to degree one-hot.
    #[default]
    Given,
    /// One-hot degree, capped at the dataset's maximum degree.
    DegreeOneHot,
    /// Entropy columns only.
    None,
}

impl std::str::FromStr for AttributeMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "given" => Ok(Self::Given),
            "degree" | "degree-one-hot" => Ok(Self::DegreeOneHot),
            "none" => Ok(Self::None),
            other => Err(format!("unknown attribute mode `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledGraph {
    pub graph: Graph,
    pub label: usize,
    /// Per-node attribute rows, if the dataset provides them.
    pub attributes: Option<Vec<Vec<f64>>>,
}

/// One-hot degree rows of width `cap + 1`; degrees above `cap` share the last slot.
pub fn degree_one_hot(g: &Graph, cap: usize) -> Vec<Vec<f64>> {
    (0..g.node_count())
        .map(|v| {
            let mut row = vec![0.0; cap + 1];
            row[g.degree(v).min(cap)] = 1.0;
            row
        })
        .collect()
}

pub fn resolve_attributes(graphs: &[LabeledGraph], mode: AttributeMode) -> Vec<Vec<Vec<f64>>> {
    let max_degree = graphs
        .iter()
        .flat_map(|lg| lg.graph.degrees())
        .max()
        .unwrap_or(0);
    let use_degree = match mode {
        AttributeMode::Given => graphs.iter().any(|lg| lg.attributes.is_none()),
        AttributeMode::DegreeOneHot => true,
        AttributeMode::None => false,
    };
    graphs
        .iter()
        .map(|lg| {
            if use_degree {
                degree_one_hot(&lg.graph, max_degree)
            } else if mode == AttributeMode::Given {
                lg.attributes.clone().expect("checked above")
            } else {
                vec![Vec::new(); lg.graph.node_count()]
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub decay: f64,
    pub decay_every: usize,
    pub batch_size: usize,
    pub adam: AdamConfig,
    pub widths: Vec<usize>,
    pub radii: Vec<usize>,
    pub hidden_layers: usize,
    pub folds: usize,
    pub inner_folds: usize,
    pub attributes: AttributeMode,
    /// Z-score the entropy columns with training-set node statistics.
    /// Attribute columns are never rescaled.
    pub standardize_entropy: bool,
    pub mode: EntropyMode,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 300,
            learning_rate: 0.01,
            decay: 0.3,
            decay_every: 50,
            batch_size: 32,
            adam: AdamConfig::default(),
            widths: vec![8, 16, 32],
            radii: vec![1, 2, 3, 4],
            hidden_layers: 1,
            folds: 10,
            inner_folds: 3,
            attributes: AttributeMode::Given,
            standardize_entropy: true,
            mode: EntropyMode::Auto,
            seed: 0,
        }
    }
}

impl TrainConfig {
    /// `lr0 * decay^floor(epoch / decay_every)`.
    pub fn learning_rate_at(&self, epoch: usize) -> f64 {
        let steps = i32::try_from(epoch / self.decay_every).unwrap_or(i32::MAX);
        self.learning_rate * self.decay.powi(steps)
    }

    fn validate(&self) -> Result<(), ReadoutError> {
        let bad = |m: &str| Err(ReadoutError::BadConfig(m.into()));
        if self.epochs == 0 {
            return bad("epochs must be positive");
        }
        if !(self.decay > 0.0 && self.decay < 1.0) {
            return bad("decay must lie in (0, 1)");
        }
        if self.decay_every == 0 || self.batch_size == 0 {
            return bad("decay_every and batch_size must be positive");
        }
        if self.widths.is_empty() || self.widths.contains(&0) {
            return bad("widths must be nonempty and positive");
        }
        if self.radii.is_empty() || self.radii.contains(&0) {
            return bad("radii must be nonempty and positive");
        }
        if self.folds < 2 || self.inner_folds < 2 {
            return bad("folds and inner_folds must be at least 2");
        }
        Ok(())
    }
}

/// Trains one model on `(features, label)` pairs. Returns the model and
/// the mean training loss of every epoch.
pub fn train_model(
    samples: &[(&FeatureMatrix, usize)],
    classes: usize,
    width: usize,
    cfg: &TrainConfig,
    seed: u64,
) -> (ReadoutModel, Vec<f64>) {
    let mut rng = substream(seed, 0);
    let input = samples.first().map_or(0, |(fm, _)| fm.cols);
    let mut model = ReadoutModel::new(input, width, classes, cfg.hidden_layers, &mut rng);
    let mut params = model.params();
    let mut adam = Adam::new(params.len(), cfg.adam);
    let mut order: Vec<usize> = (0..samples.len()).collect();
    let mut history = Vec::with_capacity(cfg.epochs);
    let mut grad = vec![0.0; params.len()];
    for epoch in 0..cfg.epochs {
        let lr = cfg.learning_rate_at(epoch);
        order.shuffle(&mut rng);
        let mut total = 0.0;
        for batch in order.chunks(cfg.batch_size) {
            grad.iter_mut().for_each(|g| *g = 0.0);
            let scale = 1.0 / batch.len() as f64;
            for &i in batch {
                let (fm, label) = samples[i];
                total += model.loss_and_grad(fm.row_iter(), label, scale, &mut grad);
            }
            adam.step(&mut params, &grad, lr);
            model.set_params(&params);
        }
        history.push(total / samples.len().max(1) as f64);
    }
    (model, history)
}

fn accuracy_of(model: &ReadoutModel, samples: &[(&FeatureMatrix, usize)]) -> f64 {
    let hits = samples
        .iter()
        .filter(|(fm, y)| predict(model, fm).expect("shapes checked") == *y)
        .count();
    hits as f64 / samples.len() as f64
}

/// Stratified fold assignment: each class is shuffled and dealt round-robin.
pub fn stratified_folds(labels: &[usize], folds: usize, seed: u64, stream: u64) -> Vec<usize> {
    let mut rng = substream(seed, stream);
    let mut fold_of = vec![0; labels.len()];
    let classes = labels.iter().copied().max().map_or(0, |m| m + 1);
    let mut next = 0;
    for c in 0..classes {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == c).collect();
        members.shuffle(&mut rng);
        for i in members {
            fold_of[i] = next % folds;
            next += 1;
        }
    }
    fold_of
}

/// Per-graph features for every radius in the grid.
struct Prepared {
    labels: Vec<usize>,
    classes: usize,
    attribute_dim: usize,
    /// `features[r_index][graph]`
    features: Vec<Vec<FeatureMatrix>>,
}

fn prepare(graphs: &[LabeledGraph], cfg: &TrainConfig) -> Result<Prepared, ReadoutError> {
    let max_r = *cfg.radii.iter().max().expect("validated nonempty");
    let attrs = resolve_attributes(graphs, cfg.attributes);
    let embeddings: Vec<EmbeddingMatrix> = graphs
        .par_iter()
        .map(|lg| embed_graph(&lg.graph, &EmbeddingConfig::new(max_r, cfg.mode)))
        .collect::<Result<_, _>>()?;
    let features = cfg
        .radii
        .iter()
        .map(|&r| {
            embeddings
                .iter()
                .zip(&attrs)
                .map(|(h, x)| augment(x, &h.truncated(r)))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<_, _>>()?;
    let labels: Vec<usize> = graphs.iter().map(|lg| lg.label).collect();
    let classes = labels.iter().copied().max().map_or(0, |m| m + 1);
    Ok(Prepared {
        labels,
        classes,
        attribute_dim: attrs.first().and_then(|a| a.first()).map_or(0, Vec::len),
        features,
    })
}

fn check_counts(labels: &[usize], classes: usize, needed: usize) -> Result<(), ReadoutError> {
    if classes < 2 {
        return Err(ReadoutError::TooFewGraphs {
            class: 1,
            count: 0,
            needed,
        });
    }
    for c in 0..classes {
        let count = labels.iter().filter(|&&l| l == c).count();
        if count < needed {
            return Err(ReadoutError::TooFewGraphs { class: c, count, needed });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub radius: usize,
    pub width: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub folds: Vec<FoldResult>,
    pub accuracy: Summary,
    /// Hyperparameters of the returned model (most often selected across folds).
    pub radius: usize,
    pub width: usize,
}

/// Training and test features for one split, rescaled with statistics of
/// the training graphs when configured.
fn split_features(
    prep: &Prepared,
    ri: usize,
    train: &[usize],
    test: &[usize],
    cfg: &TrainConfig,
) -> (Vec<FeatureMatrix>, Vec<FeatureMatrix>, Option<Scaler>) {
    let feats = &prep.features[ri];
    let scaler = cfg
        .standardize_entropy
        .then(|| Scaler::fit(train.iter().map(|&i| &feats[i]), prep.attribute_dim));
    let take = |ids: &[usize]| -> Vec<FeatureMatrix> {
        ids.iter()
            .map(|&i| match &scaler {
                Some(s) => s.apply(&feats[i]),
                None => feats[i].clone(),
            })
            .collect()
    };
    (take(train), take(test), scaler)
}

fn paired<'a>(features: &'a [FeatureMatrix], ids: &[usize], labels: &[usize]) -> Vec<(&'a FeatureMatrix, usize)> {
    features.iter().zip(ids).map(|(f, &i)| (f, labels[i])).collect()
}

/// Inner-CV mean accuracy of every `(radius index, width)` pair on `subset`.
fn select(prep: &Prepared, subset: &[usize], cfg: &TrainConfig, seed: u64) -> (usize, usize) {
    let grid: Vec<(usize, usize)> = (0..cfg.radii.len())
        .flat_map(|ri| cfg.widths.iter().map(move |&w| (ri, w)))
        .collect();
    if grid.len() == 1 {
        return grid[0];
    }
    let sub_labels: Vec<usize> = subset.iter().map(|&i| prep.labels[i]).collect();
    let inner = stratified_folds(&sub_labels, cfg.inner_folds, seed, 1);
    let score = |&(ri, w): &(usize, usize)| {
        let mut total = 0.0;
        for f in 0..cfg.inner_folds {
            let pick = |held: bool| -> Vec<usize> {
                subset
                    .iter()
                    .zip(&inner)
                    .filter(|(_, &fi)| (fi == f) == held)
                    .map(|(&i, _)| i)
                    .collect()
            };
            let (train_ids, test_ids) = (pick(false), pick(true));
            let (train, test, _) = split_features(prep, ri, &train_ids, &test_ids, cfg);
            let (model, _) = train_model(
                &paired(&train, &train_ids, &prep.labels),
                prep.classes,
                w,
                cfg,
                seed ^ (f as u64 + 1),
            );
            total += accuracy_of(&model, &paired(&test, &test_ids, &prep.labels));
        }
        total / cfg.inner_folds as f64
    };
    let scores: Vec<f64> = grid.par_iter().map(score).collect();
    let best = (0..grid.len())
        .max_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(b.cmp(&a)))
        .expect("nonempty grid");
    grid[best]
}

/// Stratified k-fold cross-validation with inner-CV selection of radius
/// and width per fold, then a final model trained on every graph.
/// The returned checkpoint carries the model and everything needed to
/// featurize new graphs for it.
pub fn train(graphs: &[LabeledGraph], cfg: &TrainConfig) -> Result<(Checkpoint, TrainReport), ReadoutError> {
    cfg.validate()?;
    let prep = prepare(graphs, cfg)?;
    let needs_inner = cfg.radii.len() * cfg.widths.len() > 1;
    check_counts(&prep.labels, prep.classes, cfg.folds)?;
    let fold_of = stratified_folds(&prep.labels, cfg.folds, cfg.seed, 0);

    let folds: Vec<FoldResult> = (0..cfg.folds)
        .into_par_iter()
        .map(|f| {
            let seed = substream_seed(cfg.seed, f as u64);
            let train_ids: Vec<usize> = (0..graphs.len()).filter(|&i| fold_of[i] != f).collect();
            let test_ids: Vec<usize> = (0..graphs.len()).filter(|&i| fold_of[i] == f).collect();
            let (ri, width) = if needs_inner {
                select(&prep, &train_ids, cfg, seed)
            } else {
                (0, cfg.widths[0])
            };
            let (train, test, _) = split_features(&prep, ri, &train_ids, &test_ids, cfg);
            let (model, _) = train_model(
                &paired(&train, &train_ids, &prep.labels),
                prep.classes,
                width,
                cfg,
                seed,
            );
            FoldResult {
                fold: f,
                radius: cfg.radii[ri],
                width,
                accuracy: accuracy_of(&model, &paired(&test, &test_ids, &prep.labels)),
            }
        })
        .collect();

    let accs: Vec<f64> = folds.iter().map(|f| f.accuracy).collect();
    let (ri, width) = most_selected(&folds, cfg);
    let all_ids: Vec<usize> = (0..graphs.len()).collect();
    let (all, _, scaler) = split_features(&prep, ri, &all_ids, &[], cfg);
    let (model, _) = train_model(
        &paired(&all, &all_ids, &prep.labels),
        prep.classes,
        width,
        cfg,
        substream_seed(cfg.seed, u64::MAX),
    );
    let checkpoint = Checkpoint {
        model,
        radius: cfg.radii[ri],
        width,
        attributes: cfg.attributes,
        mode: cfg.mode,
        attribute_dim: prep.attribute_dim,
        scaler,
    };
    Ok((
        checkpoint,
        TrainReport {
            accuracy: Summary::of(&accs),
            folds,
            radius: cfg.radii[ri],
            width,
        },
    ))
}

fn most_selected(folds: &[FoldResult], cfg: &TrainConfig) -> (usize, usize) {
    let mut best = (0, cfg.widths[0]);
    let mut best_count = 0;
    for (ri, &r) in cfg.radii.iter().enumerate() {
        for &w in &cfg.widths {
            let count = folds.iter().filter(|f| f.radius == r && f.width == w).count();
            if count > best_count {
                best = (ri, w);
                best_count = count;
            }
        }
    }
    best
}

fn substream_seed(seed: u64, index: u64) -> u64 {
    use rand::RngCore;
    substream(seed, index).next_u64()
}

/// Largest relative difference between the backpropagated gradient of one
/// graph's loss and central finite differences with step `h`.
pub fn gradient_check(model: &ReadoutModel, fm: &FeatureMatrix, label: usize, h: f64) -> f64 {
    let mut analytic = vec![0.0; model.param_count()];
    model.loss_and_grad(fm.row_iter(), label, 1.0, &mut analytic);
    let base = model.params();
    let mut probe = model.clone();
    let mut worst: f64 = 0.0;
    let mut scratch = vec![0.0; model.param_count()];
    let mut loss_at = |params: &[f64]| {
        probe.set_params(params);
        probe.loss_and_grad(fm.row_iter(), label, 1.0, &mut scratch)
    };
    let mut shifted = base.clone();
    for i in 0..base.len() {
        shifted[i] = base[i] + h;
        let up = loss_at(&shifted);
        shifted[i] = base[i] - h;
        let down = loss_at(&shifted);
        shifted[i] = base[i];
        let numeric = (up - down) / (2.0 * h);
        let denom = analytic[i].abs().max(numeric.abs()).max(1e-4);
        worst = worst.max((analytic[i] - numeric).abs() / denom);
    }
    worst
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub model: ReadoutModel,
    pub radius: usize,
    pub width: usize,
    pub attributes: AttributeMode,
    pub mode: EntropyMode,
    /// Attribute columns the model was trained with.
    pub attribute_dim: usize,
    pub scaler: Option<Scaler>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::rng;
    use rand::Rng;

    fn random_fm(rows: usize, cols: usize, seed: u64) -> FeatureMatrix {
        let mut r = rng(seed);
        FeatureMatrix {
            rows,
            cols,
            data: (0..rows * cols).map(|_| r.gen_range(-1.0..1.0)).collect(),
        }
    }

    #[test]
    fn augment_shapes() {
        let g = Graph::new(3, &[(0, 1), (1, 2)]).unwrap();
        let h = embed_graph(&g, &EmbeddingConfig::new(4, EntropyMode::Exact)).unwrap();
        let x = vec![vec![1.0, 0.0, 2.0]; 3];
        assert_eq!(augment(&x, &h).unwrap().cols, 7);
        let none = vec![Vec::new(); 3];
        let fm = augment(&none, &h).unwrap();
        assert_eq!(fm.data, h.data);
        assert_eq!(
            augment(&x[..2], &h),
            Err(ReadoutError::RowMismatch { attributes: 2, embeddings: 3 })
        );
    }

    #[test]
    fn forward_checks_shape() {
        let m = ReadoutModel::new(4, 8, 2, 1, &mut rng(0));
        assert_eq!(
            forward(&m, &random_fm(3, 5, 0)),
            Err(ReadoutError::ShapeMismatch { expected: 4, got: 5 })
        );
        let p = forward(&m, &random_fm(3, 4, 0)).unwrap();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn pooled_is_sum_of_rows() {
        let m = ReadoutModel::new(3, 5, 2, 1, &mut rng(2));
        let fm = random_fm(1, 3, 4);
        assert_eq!(m.pooled(fm.row_iter()), m.phi.forward(fm.row(0)));
        let fm = random_fm(4, 3, 5);
        let mut doubled = fm.clone();
        doubled.data.extend_from_slice(&fm.data);
        doubled.rows *= 2;
        let once = m.pooled(fm.row_iter());
        let twice = m.pooled(doubled.row_iter());
        for (a, b) in once.iter().zip(&twice) {
            assert!((2.0 * a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn adam_zero_gradient_is_a_no_op() {
        let mut p = vec![0.3, -1.2, 4.0];
        let before = p.clone();
        let mut adam = Adam::new(3, AdamConfig::default());
        adam.step(&mut p, &[0.0; 3], 0.01);
        assert_eq!(p, before);
    }

    #[test]
    fn adam_first_step_moves_by_lr() {
        // bias correction makes the first step lr * g / (|g| + eps)
        let mut p = vec![1.0, 1.0];
        let mut adam = Adam::new(2, AdamConfig::default());
        adam.step(&mut p, &[2.0, -0.5], 0.1);
        assert!((p[0] - 0.9).abs() < 1e-8);
        assert!((p[1] - 1.1).abs() < 1e-8);
    }

    #[test]
    fn schedule_is_stepwise() {
        let cfg = TrainConfig::default();
        assert_eq!(cfg.learning_rate_at(0), 0.01);
        assert_eq!(cfg.learning_rate_at(49), 0.01);
        assert_eq!(cfg.learning_rate_at(50), 0.01 * 0.3);
        let expected = 0.01 * 0.3 * 0.3 * 0.3 * 0.3 * 0.3;
        assert!((cfg.learning_rate_at(299) / expected - 1.0).abs() < 1e-15);
        assert_eq!(cfg.learning_rate_at(300), cfg.learning_rate_at(349));
    }

    #[test]
    fn folds_are_stratified() {
        let labels: Vec<usize> = (0..40).map(|i| usize::from(i < 10)).collect();
        let f = stratified_folds(&labels, 10, 3, 0);
        for fold in 0..10 {
            let members: Vec<usize> = (0..40).filter(|&i| f[i] == fold).collect();
            assert_eq!(members.len(), 4);
            assert_eq!(members.iter().filter(|&&i| labels[i] == 1).count(), 1);
        }
    }

    #[test]
    fn degree_one_hot_caps() {
        let g = Graph::new(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let rows = degree_one_hot(&g, 2);
        assert_eq!(rows[0], vec![0.0, 0.0, 1.0]);
        assert_eq!(rows[1], vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn bad_config_rejected() {
        let cfg = TrainConfig {
            decay: 1.5,
            ..TrainConfig::default()
        };
        assert!(matches!(train(&[], &cfg), Err(ReadoutError::BadConfig(_))));
    }
}
