//! Structural node embeddings from ego-network entropies.
//!
//! Node `v` is described by `h_v = [H(G_v^1), ..., H(G_v^R)]`, where `G_v^r` is
//! the subgraph induced by all nodes within `r` hops of `v`. Structurally
//! equivalent nodes get equal vectors wherever they sit in the graph.
//!
//! Ego-networks are laid out in a canonical node order (see [`crate::canon`], seeded with hop distance from the center)
//! before any numerics run. Isomorphic ego-networks therefore produce the same
//! matrices entry for entry, and the same floating-point results, regardless
//! of how the input graph was labelled. Approximate entropies on balls larger
//! than [`CANON_APPROX_MAX_NODES`] run on BFS order instead and agree across
//! relabellings only as far as the power iteration has converged.

use std::collections::HashMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::canon::canonical_order;
use crate::entropy::{vne_approx, vne_exact, EntropyError};
use crate::graph::Graph;

/// In [`EntropyMode::Auto`], ego-networks up to this many nodes use the
/// exact entropy.
pub const AUTO_EXACT_MAX_NODES: usize = 200;

/// Largest ego-network put in canonical order before an approximate entropy.
/// Past this size the canonical search dominates the running time, and the
/// power iteration on BFS order agrees across relabellings only up to its
/// convergence tolerance.
pub const CANON_APPROX_MAX_NODES: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EmbedError {
    #[error("radius must be at least 1")]
    InvalidRadius,
    #[error("node {node} out of range for graph with {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },
    #[error(transparent)]
    Entropy(#[from] EntropyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum EntropyMode {
    Exact,
    #[serde(alias = "approx")]
    Approximate,
    /// Exact up to [`AUTO_EXACT_MAX_NODES`] nodes, approximate beyond.
    #[default]
    Auto,
}

impl EntropyMode {
    /// Whether a graph on `nodes` nodes gets the exact entropy.
    pub fn is_exact_for(self, nodes: usize) -> bool {
        match self {
            EntropyMode::Exact => true,
            EntropyMode::Approximate => false,
            EntropyMode::Auto => nodes <= AUTO_EXACT_MAX_NODES,
        }
    }

    pub fn entropy(self, g: &Graph) -> Result<f64, EntropyError> {
        let h = if self.is_exact_for(g.node_count()) {
            vne_exact(g)?
        } else {
            vne_approx(g)?.h_hat
        };
        // rounding can leave -1e-17 on graphs with zero entropy
        Ok(h.max(0.0))
    }
}

impl std::str::FromStr for EntropyMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Self::Exact),
            "approx" | "approximate" => Ok(Self::Approximate),
            "auto" => Ok(Self::Auto),
            other => Err(format!("unknown entropy mode `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingConfig {
    pub max_radius: usize,
    pub mode: EntropyMode,
    pub standardize: bool,
}

impl Default for EmbeddingConfig {
    fn default() -> Self {
        Self {
            max_radius: 4,
            mode: EntropyMode::Auto,
            standardize: false,
        }
    }
}

impl EmbeddingConfig {
    pub fn new(max_radius: usize, mode: EntropyMode) -> Self {
        Self {
            max_radius,
            mode,
            standardize: false,
        }
    }
}

/// Ego-network of a node, in canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EgoNetwork {
    pub graph: Graph,
    /// Parent-graph id of each ego-network node.
    pub original_ids: Vec<usize>,
    /// Position of the center inside `graph`.
    pub center: usize,
}

pub fn ego_network(g: &Graph, v: usize, r: usize) -> Result<EgoNetwork, EmbedError> {
    check_node(g, v)?;
    if r == 0 {
        return Err(EmbedError::InvalidRadius);
    }
    Ok(canonical_ego(g, &g.bfs_distances(v, r)))
}

fn check_node(g: &Graph, v: usize) -> Result<(), EmbedError> {
    if v >= g.node_count() {
        Err(EmbedError::NodeOutOfRange {
            node: v,
            n: g.node_count(),
        })
    } else {
        Ok(())
    }
}

/// Builds the ego-network on `ball` (BFS order, with hop distances) in
/// canonical node order, center first.
fn canonical_ego(g: &Graph, ball: &[(usize, usize)]) -> EgoNetwork {
    let nodes: Vec<usize> = ball.iter().map(|&(v, _)| v).collect();
    let sub = g
        .induced_subgraph(&nodes)
        .expect("BFS ball is a valid nonempty subset");
    let distances: Vec<usize> = ball.iter().map(|&(_, d)| d).collect();
    let order = canonical_order(&sub.graph, &distances);
    let canonical = sub
        .graph
        .induced_subgraph(&order)
        .expect("permutation of a valid subset");
    // the center is the only node at distance 0, so it sorts first
    debug_assert_eq!(order[0], 0);
    EgoNetwork {
        graph: canonical.graph,
        original_ids: order.iter().map(|&i| nodes[i]).collect(),
        center: 0,
    }
}

/// The ego-network that gets evaluated under `mode`, in canonical form when
/// the entropy is exact or the ball has at most [`CANON_APPROX_MAX_NODES`]
/// nodes, otherwise in BFS order.
fn evaluated_ego(g: &Graph, ball: &[(usize, usize)], mode: EntropyMode) -> Graph {
    if mode.is_exact_for(ball.len()) || ball.len() <= CANON_APPROX_MAX_NODES {
        canonical_ego(g, ball).graph
    } else {
        let nodes: Vec<usize> = ball.iter().map(|&(v, _)| v).collect();
        g.induced_subgraph(&nodes).expect("BFS ball is a valid nonempty subset").graph
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeEmbedding {
    pub node: usize,
    /// `values[r - 1]` is the entropy of the radius-`r` ego-network, in nats.
    pub values: Vec<f64>,
}

pub fn embed_node(g: &Graph, v: usize, cfg: &EmbeddingConfig) -> Result<NodeEmbedding, EmbedError> {
    check_node(g, v)?;
    if cfg.max_radius == 0 {
        return Err(EmbedError::InvalidRadius);
    }
    let ball = g.bfs_distances(v, cfg.max_radius);
    let mut values = Vec::with_capacity(cfg.max_radius);
    let mut prev_len = 0;
    for r in 1..=cfg.max_radius {
        // BFS order is sorted by distance, so each radius is a prefix
        let len = ball.partition_point(|&(_, d)| d <= r);
        if len == prev_len {
            // the ball stopped growing; same ego-network as radius r - 1
            let last = *values.last().expect("radius 1 always computed");
            values.push(last);
            continue;
        }
        let ego = evaluated_ego(g, &ball[..len], cfg.mode);
        values.push(cfg.mode.entropy(&ego)?);
        prev_len = len;
    }
    Ok(NodeEmbedding { node: v, values })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub graph_hash: String,
    pub config: EmbeddingConfig,
}

/// `n x R` matrix of node embeddings, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
    pub provenance: Provenance,
}

impl EmbeddingMatrix {
    pub fn row(&self, v: usize) -> &[f64] {
        &self.data[v * self.cols..(v + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|v| self.row(v).to_vec()).collect()
    }

    /// First `r` columns.
    pub fn truncated(&self, r: usize) -> EmbeddingMatrix {
        let r = r.min(self.cols);
        let data = (0..self.rows)
            .flat_map(|v| self.row(v)[..r].iter().copied())
            .collect();
        let mut provenance = self.provenance.clone();
        provenance.config.max_radius = r;
        EmbeddingMatrix {
            rows: self.rows,
            cols: r,
            data,
            provenance,
        }
    }

    /// Z-scores every column in place (population std). Constant columns
    /// become all zeros.
    pub fn standardize(&mut self) {
        let mut rows = self.to_rows();
        standardize_columns(&mut rows);
        self.data = rows.into_iter().flatten().collect();
        self.provenance.config.standardize = true;
    }
}

/// Z-scores each column of `rows` in place.
pub fn standardize_columns(rows: &mut [Vec<f64>]) {
    let n = rows.len();
    if n == 0 {
        return;
    }
    let cols = rows[0].len();
    for c in 0..cols {
        let mean = rows.iter().map(|r| r[c]).sum::<f64>() / n as f64;
        let var = rows.iter().map(|r| (r[c] - mean).powi(2)).sum::<f64>() / n as f64;
        let std = var.sqrt();
        for r in rows.iter_mut() {
            r[c] = if std > 1e-12 { (r[c] - mean) / std } else { 0.0 };
        }
    }
}

/// Order-independent SHA-256 over the node count and sorted edge list.
pub fn graph_hash(g: &Graph) -> String {
    let mut hasher = Sha256::new();
    hasher.update(format!("n {}\n", g.node_count()).as_bytes());
    for (u, v) in g.edges() {
        hasher.update(format!("{u} {v}\n").as_bytes());
    }
    hex::encode(hasher.finalize())
}

/// Wall time of the two phases of [`embed_graph_timed`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimes {
    /// BFS, induced subgraphs, and canonical relabelling.
    pub ego_seconds: f64,
    pub entropy_seconds: f64,
    /// Ego-networks left after merging identical canonical forms.
    pub distinct_ego_networks: usize,
}

/// Evaluated ego-networks of `v` for radii `1..=max_radius`, with the ones
/// that stop growing listed once; `index[r - 1]` points into the list.
fn ego_sequence(g: &Graph, v: usize, max_radius: usize, mode: EntropyMode) -> (Vec<Graph>, Vec<usize>) {
    let ball = g.bfs_distances(v, max_radius);
    let mut egos = Vec::new();
    let mut index = Vec::with_capacity(max_radius);
    let mut prev_len = 0;
    for r in 1..=max_radius {
        let len = ball.partition_point(|&(_, d)| d <= r);
        if len != prev_len {
            egos.push(evaluated_ego(g, &ball[..len], mode));
            prev_len = len;
        }
        index.push(egos.len() - 1);
    }
    (egos, index)
}

/// Embeds every node. Identical ego-networks are evaluated once; in exact
/// mode that covers every isomorphic pair, since those share a canonical form. Both phases run in parallel and
/// results are placed by index, so the output does not depend on
/// scheduling, and every row equals [`embed_node`] on that node.
pub fn embed_graph(g: &Graph, cfg: &EmbeddingConfig) -> Result<EmbeddingMatrix, EmbedError> {
    embed_graph_timed(g, cfg).map(|(m, _)| m)
}

pub fn embed_graph_timed(g: &Graph, cfg: &EmbeddingConfig) -> Result<(EmbeddingMatrix, PhaseTimes), EmbedError> {
    if cfg.max_radius == 0 {
        return Err(EmbedError::InvalidRadius);
    }
    let n = g.node_count();
    let r_max = cfg.max_radius;

    let start = Instant::now();
    let sequences: Vec<(Vec<Graph>, Vec<usize>)> = (0..n)
        .into_par_iter()
        .map(|v| ego_sequence(g, v, r_max, cfg.mode))
        .collect();
    let mut ids: HashMap<Graph, usize> = HashMap::new();
    let mut distinct: Vec<Graph> = Vec::new();
    let mut slots = Vec::with_capacity(n * r_max);
    for (egos, index) in sequences {
        let local: Vec<usize> = egos
            .into_iter()
            .map(|ego| {
                *ids.entry(ego).or_insert_with_key(|ego| {
                    distinct.push(ego.clone());
                    distinct.len() - 1
                })
            })
            .collect();
        slots.extend(index.iter().map(|&i| local[i]));
    }
    drop(ids);
    let ego_seconds = start.elapsed().as_secs_f64();

    let start = Instant::now();
    let values: Vec<f64> = distinct
        .par_iter()
        .map(|ego| cfg.mode.entropy(ego))
        .collect::<Result<_, _>>()?;
    let times = PhaseTimes {
        ego_seconds,
        entropy_seconds: start.elapsed().as_secs_f64(),
        distinct_ego_networks: distinct.len(),
    };

    let mut out = EmbeddingMatrix {
        rows: n,
        cols: r_max,
        data: slots.iter().map(|&i| values[i]).collect(),
        provenance: Provenance {
            graph_hash: graph_hash(g),
            config: EmbeddingConfig {
                standardize: false,
                ..*cfg
            },
        },
    };
    if cfg.standardize {
        out.standardize();
    }
    Ok((out, times))
}
