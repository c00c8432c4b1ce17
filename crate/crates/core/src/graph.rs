//! Simple undirected graphs with sorted adjacency.
//!
//! A [`Graph`] is immutable once built. Node ids are dense (`0..n`) and every
//! neighbor list is sorted, so iteration order (and everything computed from
//! it) is deterministic.

use std::collections::VecDeque;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("node {node} out of range for graph with {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("node subset is empty")]
    EmptySubset,
    #[error("node {0} listed twice in subset")]
    DuplicateNode(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    edge_count: usize,
}

impl Graph {
    /// Builds a graph on `n` nodes. Endpoint order within a pair is irrelevant,
    /// but the same unordered pair may appear only once.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in edges {
            for node in [u, v] {
                if node >= n {
                    return Err(GraphError::NodeOutOfRange { node, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for (u, list) in adjacency.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                let v = w[0];
                return Err(GraphError::DuplicateEdge(u.min(v), u.max(v)));
            }
        }
        Ok(Self {
            adjacency,
            edge_count: edges.len(),
        })
    }

    /// Graph with `n` nodes and no edges.
    pub fn empty(n: usize) -> Self {
        Self {
            adjacency: vec![Vec::new(); n],
            edge_count: 0,
        }
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.node_count() && self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn edge_list(&self) -> Vec<(usize, usize)> {
        self.edges().collect()
    }

    pub fn laplacian(&self) -> LaplacianView<'_> {
        LaplacianView { graph: self }
    }

    /// Relabels nodes: node `v` of `self` becomes `perm[v]` in the result.
    pub fn permuted(&self, perm: &[usize]) -> Result<Graph, GraphError> {
        let n = self.node_count();
        let edges: Vec<_> = self.edges().map(|(u, v)| (perm[u], perm[v])).collect();
        Graph::new(n, &edges)
    }

    /// Induced subgraph on `nodes`. Node `i` of the result corresponds to
    /// `nodes[i]` of `self`; the caller's order is kept.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Result<Subgraph, GraphError> {
        if nodes.is_empty() {
            return Err(GraphError::EmptySubset);
        }
        let n = self.node_count();
        let mut local = vec![usize::MAX; n];
        for (i, &v) in nodes.iter().enumerate() {
            if v >= n {
                return Err(GraphError::NodeOutOfRange { node: v, n });
            }
            if local[v] != usize::MAX {
                return Err(GraphError::DuplicateNode(v));
            }
            local[v] = i;
        }
        let mut adjacency = vec![Vec::new(); nodes.len()];
        let mut edge_count = 0;
        for (i, &v) in nodes.iter().enumerate() {
            for &w in &self.adjacency[v] {
                let j = local[w];
                if j != usize::MAX {
                    adjacency[i].push(j);
                    if i < j {
                        edge_count += 1;
                    }
                }
            }
            adjacency[i].sort_unstable();
        }
        Ok(Subgraph {
            graph: Graph {
                adjacency,
                edge_count,
            },
            original_ids: nodes.to_vec(),
        })
    }

    /// Nodes within `radius` hops of `center`, sorted by id.
    pub fn bfs_ball(&self, center: usize, radius: usize) -> Vec<usize> {
        let mut ball: Vec<usize> = self
            .bfs_distances(center, radius)
            .into_iter()
            .map(|(v, _)| v)
            .collect();
        ball.sort_unstable();
        ball
    }

    /// `(node, distance)` pairs for every node within `radius` hops of
    /// `center`, in BFS discovery order.
    pub fn bfs_distances(&self, center: usize, radius: usize) -> Vec<(usize, usize)> {
        let mut seen = vec![false; self.node_count()];
        let mut out = vec![(center, 0)];
        seen[center] = true;
        let mut queue = VecDeque::from([(center, 0usize)]);
        while let Some((v, d)) = queue.pop_front() {
            if d == radius {
                continue;
            }
            for &w in &self.adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    out.push((w, d + 1));
                    queue.push_back((w, d + 1));
                }
            }
        }
        out
    }
}

/// An induced subgraph together with the ids its nodes had in the parent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgraph {
    pub graph: Graph,
    pub original_ids: Vec<usize>,
}

/// Read-only view of `L = D - A`.
#[derive(Debug, Clone, Copy)]
pub struct LaplacianView<'a> {
    graph: &'a Graph,
}

impl LaplacianView<'_> {
    pub fn order(&self) -> usize {
        self.graph.node_count()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.graph.degree(i) as f64
        } else if self.graph.has_edge(i, j) {
            -1.0
        } else {
            0.0
        }
    }

    pub fn trace(&self) -> f64 {
        2.0 * self.graph.edge_count() as f64
    }

    /// `y = L x` in `O(n + m)`.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (v, yv) in y.iter_mut().enumerate() {
            let nbrs = self.graph.neighbors(v);
            let mut acc = nbrs.len() as f64 * x[v];
            for &w in nbrs {
                acc -= x[w];
            }
            *yv = acc;
        }
    }
}
