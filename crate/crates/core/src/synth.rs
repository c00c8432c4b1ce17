//! Synthetic structural-role datasets: small symmetric shapes attached to a
//! ring, optionally perturbed by random edge rewiring.
//!
//! Shapes and their role classes:
//!
//! ```text
//! house   b0-b1, b0-t0, b1-t1, t0-t1, t0-apex, t1-apex   roles bottom | top | apex
//! star(s) center joined to s leaves                      roles center | leaf
//! fan(s)  apex joined to every node of an s-node path    roles apex | path-end | path-interior
//! ```
//!
//! Each shape hangs off the ring by one edge from its anchor (house: `b0`,
//! star: center, fan: apex). Ring nodes form one extra class, numbered 0.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphError};
use crate::random;

pub const DEFAULT_INSTANCES: usize = 10;
pub const DEFAULT_CYCLE_LEN: usize = 30;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error("bad shape spec: {0}")]
    BadSpec(String),
    #[error("{shapes} shapes do not fit on a cycle of {cycle_len} nodes")]
    Overfull { shapes: usize, cycle_len: usize },
    #[error("graph is complete; no absent edge to rewire into")]
    Saturated,
    #[error("cannot rewire {requested} edges in a graph with {available}")]
    TooFewEdges { requested: usize, available: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeKind {
    House,
    Star(usize),
    Fan(usize),
}

impl fmt::Display for ShapeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShapeKind::House => write!(f, "house"),
            ShapeKind::Star(s) => write!(f, "star{s}"),
            ShapeKind::Fan(s) => write!(f, "fan{s}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Shape {
    pub graph: Graph,
    /// Local role id per shape node.
    pub roles: Vec<usize>,
    pub role_names: Vec<&'static str>,
    /// Node joined to the ring.
    pub anchor: usize,
}

pub fn make_shape(kind: ShapeKind) -> Result<Shape, SynthError> {
    match kind {
        ShapeKind::House => Ok(Shape {
            // b0 b1 t0 t1 apex
            graph: Graph::new(5, &[(0, 1), (0, 2), (1, 3), (2, 3), (2, 4), (3, 4)])?,
            roles: vec![0, 0, 1, 1, 2],
            role_names: vec!["bottom", "top", "apex"],
            anchor: 0,
        }),
        ShapeKind::Star(s) => {
            if s < 2 {
                return Err(SynthError::BadSpec(format!("star needs >= 2 leaves, got {s}")));
            }
            let edges: Vec<_> = (1..=s).map(|l| (0, l)).collect();
            let mut roles = vec![1; s + 1];
            roles[0] = 0;
            Ok(Shape {
                graph: Graph::new(s + 1, &edges)?,
                roles,
                role_names: vec!["center", "leaf"],
                anchor: 0,
            })
        }
        ShapeKind::Fan(s) => {
            if s < 3 {
                return Err(SynthError::BadSpec(format!("fan needs a path of >= 3 nodes, got {s}")));
            }
            let mut edges: Vec<_> = (1..=s).map(|p| (0, p)).collect();
            edges.extend((1..s).map(|p| (p, p + 1)));
            let roles = (0..=s)
                .map(|i| match i {
                    0 => 0,
                    i if i == 1 || i == s => 1,
                    _ => 2,
                })
                .collect();
            Ok(Shape {
                graph: Graph::new(s + 1, &edges)?,
                roles,
                role_names: vec!["apex", "path-end", "path-interior"],
                anchor: 0,
            })
        }
    }
}

/// Which shapes go on the ring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Configuration {
    /// `instances` copies of one shape, evenly spaced.
    Basic(ShapeKind),
    /// `instances` copies of each shape, at random distinct ring positions.
    Varied(Vec<ShapeKind>),
}

impl Configuration {
    pub fn varied_default() -> Self {
        Configuration::Varied(vec![ShapeKind::House, ShapeKind::Star(5), ShapeKind::Fan(4)])
    }

    pub fn kinds(&self) -> Vec<ShapeKind> {
        match self {
            Configuration::Basic(k) => vec![*k],
            Configuration::Varied(ks) => ks.clone(),
        }
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Configuration::Basic(ShapeKind::House) => write!(f, "basic-house"),
            Configuration::Basic(ShapeKind::Star(5)) => write!(f, "basic-star"),
            Configuration::Basic(ShapeKind::Fan(4)) => write!(f, "basic-fan"),
            Configuration::Basic(k) => write!(f, "basic-{k}"),
            Configuration::Varied(_) if *self == Configuration::varied_default() => {
                write!(f, "varied")
            }
            Configuration::Varied(ks) => {
                let names: Vec<String> = ks.iter().map(ToString::to_string).collect();
                write!(f, "varied-{}", names.join("-"))
            }
        }
    }
}

impl FromStr for Configuration {
    type Err = SynthError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "basic-house" => Ok(Configuration::Basic(ShapeKind::House)),
            "basic-star" => Ok(Configuration::Basic(ShapeKind::Star(5))),
            "basic-fan" => Ok(Configuration::Basic(ShapeKind::Fan(4))),
            "varied" => Ok(Configuration::varied_default()),
            other => Err(SynthError::BadSpec(format!("unknown configuration `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub config: String,
    pub seed: u64,
    pub rewired: usize,
    #[serde(default)]
    pub class_names: Vec<String>,
}

/// A labelled graph: node `v` belongs to structural class `labels[v]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeDataset {
    pub graph: Graph,
    pub labels: Vec<usize>,
    pub meta: DatasetMeta,
}

impl ShapeDataset {
    /// Wraps an arbitrary graph with every node in class 0.
    pub fn unlabeled(graph: Graph) -> Self {
        let labels = vec![0; graph.node_count()];
        Self {
            graph,
            labels,
            meta: DatasetMeta {
                config: "custom".into(),
                seed: 0,
                rewired: 0,
                class_names: vec!["all".into()],
            },
        }
    }

    pub fn class_count(&self) -> usize {
        self.labels.iter().max().map_or(0, |m| m + 1)
    }
}

pub fn build_configuration(
    config: &Configuration,
    instances: usize,
    cycle_len: usize,
    seed: u64,
) -> Result<ShapeDataset, SynthError> {
    if cycle_len < 3 {
        return Err(SynthError::BadSpec(format!("cycle length {cycle_len} < 3")));
    }
    if instances == 0 {
        return Err(SynthError::BadSpec("no shape instances".into()));
    }
    let kinds = config.kinds();
    let total = instances * kinds.len();
    if total > cycle_len {
        return Err(SynthError::Overfull {
            shapes: total,
            cycle_len,
        });
    }

    let shapes = kinds
        .iter()
        .map(|&k| make_shape(k))
        .collect::<Result<Vec<_>, _>>()?;
    let mut class_names = vec!["cycle".to_string()];
    let mut role_offset = Vec::with_capacity(kinds.len());
    for (kind, shape) in kinds.iter().zip(&shapes) {
        role_offset.push(class_names.len());
        class_names.extend(shape.role_names.iter().map(|r| format!("{kind}/{r}")));
    }

    let positions: Vec<usize> = match config {
        Configuration::Basic(_) => {
            let step = cycle_len / instances;
            (0..instances).map(|i| i * step).collect()
        }
        Configuration::Varied(_) => {
            let mut all: Vec<usize> = (0..cycle_len).collect();
            all.shuffle(&mut random::rng(seed));
            all.truncate(total);
            all
        }
    };

    let mut edges: Vec<(usize, usize)> = (0..cycle_len).map(|i| (i, (i + 1) % cycle_len)).collect();
    let mut labels = vec![0; cycle_len];
    let mut next = cycle_len;
    for (slot, &pos) in positions.iter().enumerate() {
        let which = slot / instances;
        let shape = &shapes[which];
        let base = next;
        edges.extend(shape.graph.edges().map(|(u, v)| (base + u, base + v)));
        edges.push((pos, base + shape.anchor));
        labels.extend(shape.roles.iter().map(|r| r + role_offset[which]));
        next += shape.graph.node_count();
    }

    Ok(ShapeDataset {
        graph: Graph::new(next, &edges)?,
        labels,
        meta: DatasetMeta {
            config: config.to_string(),
            seed,
            rewired: 0,
            class_names,
        },
    })
}

/// Rewires `k` edges: each step deletes a uniformly random edge and inserts a
/// uniformly random pair that was absent before the deletion (so the removed
/// edge never comes straight back). Node and edge counts are preserved.
pub fn perturb(ds: &ShapeDataset, k: usize, seed: u64) -> Result<ShapeDataset, SynthError> {
    let n = ds.graph.node_count();
    let mut edges = ds.graph.edge_list();
    if k > edges.len() {
        return Err(SynthError::TooFewEdges {
            requested: k,
            available: edges.len(),
        });
    }
    let max_edges = n * n.saturating_sub(1) / 2;
    if k > 0 && edges.len() >= max_edges {
        return Err(SynthError::Saturated);
    }
    let mut present: HashSet<(usize, usize)> = edges.iter().copied().collect();
    let mut rng = random::rng(seed);
    for _ in 0..k {
        let added = sample_absent(n, &present, &mut rng);
        let idx = rng.gen_range(0..edges.len());
        let removed = edges.swap_remove(idx);
        present.remove(&removed);
        present.insert(added);
        edges.push(added);
    }
    let mut meta = ds.meta.clone();
    meta.rewired += k;
    Ok(ShapeDataset {
        graph: Graph::new(n, &edges)?,
        labels: ds.labels.clone(),
        meta,
    })
}

fn sample_absent<R: Rng>(n: usize, present: &HashSet<(usize, usize)>, rng: &mut R) -> (usize, usize) {
    let max_edges = n * (n - 1) / 2;
    // rejection sampling is fast unless the graph is nearly complete
    if present.len() * 2 < max_edges {
        loop {
            let u = rng.gen_range(0..n);
            let v = rng.gen_range(0..n);
            let key = (u.min(v), u.max(v));
            if u != v && !present.contains(&key) {
                return key;
            }
        }
    }
    let absent: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
        .filter(|e| !present.contains(e))
        .collect();
    absent[rng.gen_range(0..absent.len())]
}

pub fn has_triangle(g: &Graph) -> bool {
    g.edges().any(|(u, v)| {
        let (a, b) = (g.neighbors(u), g.neighbors(v));
        // both lists are sorted
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    })
}

/// Random triangle-free graph on `n` nodes with up to `m` edges: node
/// pairs are visited in random order and kept unless they close a triangle.
fn triangle_free<R: Rng>(n: usize, m: usize, rng: &mut R) -> Vec<(usize, usize)> {
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| ((u + 1)..n).map(move |v| (u, v))).collect();
    pairs.shuffle(rng);
    let mut adj = vec![HashSet::new(); n];
    let mut edges = Vec::with_capacity(m);
    for (u, v) in pairs {
        if edges.len() == m {
            break;
        }
        if adj[u].intersection(&adj[v]).next().is_none() {
            adj[u].insert(v);
            adj[v].insert(u);
            edges.push((u, v));
        }
    }
    edges
}

/// Balanced two-class graph task: `per_class` graphs containing a triangle
/// (label 1) and `per_class` triangle-free ones (label 0), alternating.
/// Both classes share the same node and edge counts (10 to 20 nodes,
/// average degree 2 to 3), so only the presence of a triangle tells them
/// apart. A positive is a triangle-free graph with one edge fewer plus one
/// edge joining two nodes at distance 2.
pub fn triangle_task(per_class: usize, seed: u64) -> Vec<(Graph, usize)> {
    let mut rng = random::rng(seed);
    let mut out = Vec::with_capacity(2 * per_class);
    while out.len() < 2 * per_class {
        let label = out.len() % 2;
        let n = rng.gen_range(10..=20);
        let m = (rng.gen_range(2.0..3.0) * n as f64 / 2.0).round() as usize;
        let mut edges = triangle_free(n, m - label, &mut rng);
        if edges.len() + label != m {
            continue;
        }
        if label == 1 {
            let g = Graph::new(n, &edges).expect("simple by construction");
            let closers: Vec<(usize, usize)> = (0..n)
                .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
                .filter(|&(u, v)| !g.has_edge(u, v) && g.neighbors(u).iter().any(|w| g.has_edge(*w, v)))
                .collect();
            let Some(&pair) = closers.choose(&mut rng) else {
                continue;
            };
            edges.push(pair);
        }
        let g = Graph::new(n, &edges).expect("simple by construction");
        debug_assert_eq!(usize::from(has_triangle(&g)), label);
        out.push((g, label));
    }
    out
}
