//! Canonical node ordering for small graphs.
//!
//! Individualization-refinement: color refinement splits nodes by iterated
//! neighborhood signatures; when a cell of tied nodes survives, each member is
//! individualized in turn and refinement reruns. Every discrete coloring
//! reached is a candidate ordering, and the one whose relabelled edge list is
//! lexicographically smallest wins. Twins (nodes with equal neighborhoods
//! apart from each other) are interchangeable, so only one per twin class is
//! branched on. Two leaves with equal certificates give an automorphism;
//! automorphisms fixing the current branch prune candidates in the same orbit,
//! and one that maps the best leaf's branch onto the current one ends the
//! current branch early, since it can only repeat what was already seen.
//!
//! The search stops after [`LEAF_BUDGET`] candidate orderings. Past that the
//! best ordering found so far is used; it is deterministic but no longer
//! guaranteed label-independent.

use crate::graph::Graph;

pub const LEAF_BUDGET: usize = 512;

fn rerank<T: Ord + Clone>(signatures: &[T]) -> (Vec<usize>, usize) {
    let mut distinct = signatures.to_vec();
    distinct.sort();
    distinct.dedup();
    let ranks = signatures
        .iter()
        .map(|s| distinct.binary_search(s).expect("present"))
        .collect();
    (ranks, distinct.len())
}

/// Refines `colors` to the coarsest stable coloring. Relative order of the
/// input colors is preserved.
fn refine(g: &Graph, colors: &[usize]) -> (Vec<usize>, usize) {
    let k = g.node_count();
    let (mut colors, mut classes) = rerank(colors);
    // neighbor colors of node i live in flat[start[i]..start[i + 1]]
    let mut start = Vec::with_capacity(k + 1);
    start.push(0);
    for i in 0..k {
        start.push(start[i] + g.neighbors(i).len());
    }
    let mut flat = vec![0; start[k]];
    let mut order: Vec<usize> = (0..k).collect();
    while classes < k {
        for i in 0..k {
            let row = &mut flat[start[i]..start[i + 1]];
            for (slot, &j) in row.iter_mut().zip(g.neighbors(i)) {
                *slot = colors[j];
            }
            row.sort_unstable();
        }
        let key = |i: usize| (colors[i], &flat[start[i]..start[i + 1]]);
        order.sort_unstable_by(|&a, &b| key(a).cmp(&key(b)));
        let mut next = vec![0; k];
        let mut next_classes = 1;
        for w in 1..k {
            if key(order[w]) != key(order[w - 1]) {
                next_classes += 1;
            }
            next[order[w]] = next_classes - 1;
        }
        colors = next;
        if next_classes == classes {
            break;
        }
        classes = next_classes;
    }
    (colors, classes)
}

fn are_twins(g: &Graph, u: usize, v: usize) -> bool {
    let strip = |a: usize, b: usize| g.neighbors(a).iter().copied().filter(move |&x| x != b);
    strip(u, v).eq(strip(v, u))
}

/// Stored automorphisms used for orbit pruning; more rarely pay off.
const MAX_AUTOMORPHISMS: usize = 64;

struct Search<'a> {
    graph: &'a Graph,
    /// Certificate, coloring, and individualized nodes of the best leaf.
    best: Option<Best>,
    /// Individualized nodes on the current branch, outermost first.
    path: Vec<usize>,
    automorphisms: Vec<Vec<usize>>,
    leaves: usize,
}

struct Best {
    cert: Vec<(usize, usize)>,
    colors: Vec<usize>,
    path: Vec<usize>,
}

impl Search<'_> {
    /// Returns `Some(level)` when the branch taken at depth `level` turned out
    /// to mirror one already explored, so everything below it can be skipped.
    fn visit(&mut self, colors: Vec<usize>, classes: usize) -> Option<usize> {
        if self.leaves >= LEAF_BUDGET {
            return None;
        }
        let k = self.graph.node_count();
        if classes == k {
            return self.leaf(colors);
        }

        // first (lowest-color) cell with more than one node
        let mut size = vec![0usize; classes];
        for &c in &colors {
            size[c] += 1;
        }
        let target = (0..classes).find(|&c| size[c] > 1).expect("not discrete");
        let cell: Vec<usize> = (0..k).filter(|&i| colors[i] == target).collect();

        let depth = self.path.len();
        let mut tried: Vec<usize> = Vec::new();
        for &v in &cell {
            if tried.iter().any(|&u| are_twins(self.graph, u, v) || self.maps_within_prefix(u, v)) {
                continue;
            }
            tried.push(v);
            // v sorts ahead of the rest of its cell
            let split: Vec<usize> = (0..k)
                .map(|i| 2 * colors[i] + usize::from(i != v))
                .collect();
            let (next, next_classes) = refine(self.graph, &split);
            self.path.push(v);
            let jump = self.visit(next, next_classes);
            self.path.pop();
            if let Some(level) = jump {
                if level < depth {
                    return jump;
                }
            }
        }
        None
    }

    fn leaf(&mut self, colors: Vec<usize>) -> Option<usize> {
        self.leaves += 1;
        let mut cert: Vec<(usize, usize)> = self
            .graph
            .edges()
            .map(|(u, v)| {
                let (a, b) = (colors[u], colors[v]);
                (a.min(b), a.max(b))
            })
            .collect();
        cert.sort_unstable();
        let Some(best) = &self.best else {
            self.best = Some(Best { cert, colors, path: self.path.clone() });
            return None;
        };
        match cert.cmp(&best.cert) {
            std::cmp::Ordering::Less => {
                self.best = Some(Best { cert, colors, path: self.path.clone() });
                None
            }
            std::cmp::Ordering::Greater => None,
            std::cmp::Ordering::Equal => {
                // same relabelled graph: node at position p in the best leaf
                // maps to the node at position p here
                let k = colors.len();
                let mut at = vec![0; k];
                for (node, &pos) in colors.iter().enumerate() {
                    at[pos] = node;
                }
                let gamma: Vec<usize> = best.colors.iter().map(|&pos| at[pos]).collect();
                let level = best.path.iter().zip(&self.path).position(|(a, b)| a != b)?;
                let mirrors = best.path[..=level]
                    .iter()
                    .zip(&self.path[..=level])
                    .all(|(&a, &b)| gamma[a] == b);
                if self.automorphisms.len() < MAX_AUTOMORPHISMS {
                    self.automorphisms.push(gamma);
                }
                mirrors.then_some(level)
            }
        }
    }

    /// Whether a stored automorphism fixing the current branch maps `u` to `v`.
    fn maps_within_prefix(&self, u: usize, v: usize) -> bool {
        self.automorphisms
            .iter()
            .any(|g| g[u] == v && self.path.iter().all(|&p| g[p] == p))
    }
}

/// Returns `order` such that `order[p]` is the node placed at position `p`.
/// `initial` is an isomorphism-invariant starting color per node; nodes with
/// smaller initial colors come first.
pub fn canonical_order(g: &Graph, initial: &[usize]) -> Vec<usize> {
    let k = g.node_count();
    if k == 0 {
        return Vec::new();
    }
    let (colors, classes) = refine(g, initial);
    let mut search = Search {
        graph: g,
        best: None,
        path: Vec::new(),
        automorphisms: Vec::new(),
        leaves: 0,
    };
    search.visit(colors, classes);
    let colors = search.best.expect("at least one leaf").colors;
    let mut order = vec![0; k];
    for (node, &pos) in colors.iter().enumerate() {
        order[pos] = node;
    }
    order
}
