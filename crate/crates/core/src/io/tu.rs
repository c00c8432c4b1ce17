//! TU graph-classification datasets.
//!
//! `<name>_A.txt` lists edges as `i, j` over 1-based global node ids,
//! `<name>_graph_indicator.txt` gives the 1-based graph of each node,
//! `<name>_graph_labels.txt` one class per graph, and the optional
//! `<name>_node_labels.txt` one categorical label per node. Both edge
//! directions usually appear; they are merged, and self-loops are dropped.

use std::collections::HashSet;
use std::path::Path;

use super::{read_text, IoError};
use crate::graph::Graph;
use crate::readout::LabeledGraph;

/// Raw file contents.
#[derive(Debug, Clone, Copy)]
pub struct TuFiles<'a> {
    pub adjacency: &'a str,
    pub graph_indicator: &'a str,
    pub graph_labels: &'a str,
    pub node_labels: Option<&'a str>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TuDataset {
    /// Graph labels are remapped to `0..classes` in sorted order of the raw values.
    pub graphs: Vec<LabeledGraph>,
    /// Raw label of each class id.
    pub class_values: Vec<i64>,
    /// Raw node label of each one-hot column.
    pub node_label_values: Vec<i64>,
    pub self_loops_dropped: usize,
}

impl TuDataset {
    pub fn classes(&self) -> usize {
        self.class_values.len()
    }
}

fn numbers(text: &str, file: &str, per_line: usize) -> Result<Vec<Vec<i64>>, IoError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() != per_line {
            return Err(IoError::Parse {
                line: i + 1,
                message: format!("{file}: expected {per_line} fields, found {}", fields.len()),
            });
        }
        let parsed = fields
            .iter()
            .map(|f| f.parse::<i64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| IoError::Parse {
                line: i + 1,
                message: format!("{file}: {e}"),
            })?;
        out.push(parsed);
    }
    Ok(out)
}

fn dense_values(values: &[i64]) -> (Vec<usize>, Vec<i64>) {
    let mut distinct = values.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let ids = values
        .iter()
        .map(|v| distinct.binary_search(v).expect("present"))
        .collect();
    (ids, distinct)
}

pub fn parse_tu_dataset(files: TuFiles<'_>) -> Result<TuDataset, IoError> {
    let indicator: Vec<i64> = numbers(files.graph_indicator, "graph_indicator", 1)?
        .into_iter()
        .map(|r| r[0])
        .collect();
    let raw_labels: Vec<i64> = numbers(files.graph_labels, "graph_labels", 1)?
        .into_iter()
        .map(|r| r[0])
        .collect();
    let edges = numbers(files.adjacency, "A", 2)?;
    let node_labels: Option<Vec<i64>> = files
        .node_labels
        .map(|t| numbers(t, "node_labels", 1).map(|rows| rows.into_iter().map(|r| r[0]).collect()))
        .transpose()?;

    let graphs_n = raw_labels.len();
    let nodes_n = indicator.len();
    if graphs_n == 0 || nodes_n == 0 {
        return Err(IoError::Empty);
    }
    let bad = |m: String| Err(IoError::InconsistentIndicator(m));
    let mut graph_of = Vec::with_capacity(nodes_n);
    for (i, &g) in indicator.iter().enumerate() {
        if g < 1 || g as u64 > graphs_n as u64 {
            return bad(format!("node {} assigned to graph {g}, but there are {graphs_n} graphs", i + 1));
        }
        graph_of.push((g - 1) as usize);
    }
    if let Some(labels) = &node_labels {
        if labels.len() != nodes_n {
            return bad(format!("{} node labels for {nodes_n} nodes", labels.len()));
        }
    }

    // local index of each node inside its graph, in global id order
    let mut local = vec![0usize; nodes_n];
    let mut sizes = vec![0usize; graphs_n];
    for (v, &g) in graph_of.iter().enumerate() {
        local[v] = sizes[g];
        sizes[g] += 1;
    }
    if let Some(g) = sizes.iter().position(|&s| s == 0) {
        return bad(format!("graph {} has no nodes", g + 1));
    }

    let mut per_graph: Vec<Vec<(usize, usize)>> = vec![Vec::new(); graphs_n];
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    let mut self_loops = 0;
    for (i, e) in edges.iter().enumerate() {
        let mut ends = [0usize; 2];
        for (k, &x) in e.iter().enumerate() {
            if x < 1 || x as u64 > nodes_n as u64 {
                return Err(IoError::Parse {
                    line: i + 1,
                    message: format!("A: node {x} out of range 1..={nodes_n}"),
                });
            }
            ends[k] = (x - 1) as usize;
        }
        let [u, v] = ends;
        if u == v {
            self_loops += 1;
            continue;
        }
        if graph_of[u] != graph_of[v] {
            return bad(format!("edge {} {} joins graphs {} and {}", u + 1, v + 1, graph_of[u] + 1, graph_of[v] + 1));
        }
        if seen.insert((u.min(v), u.max(v))) {
            per_graph[graph_of[u]].push((local[u], local[v]));
        }
    }

    let (class_ids, class_values) = dense_values(&raw_labels);
    let (node_ids, node_label_values) = match &node_labels {
        Some(l) => {
            let (ids, values) = dense_values(l);
            (Some(ids), values)
        }
        None => (None, Vec::new()),
    };
    let width = node_label_values.len();
    let mut attributes: Vec<Vec<Vec<f64>>> = sizes.iter().map(|&s| Vec::with_capacity(s)).collect();
    if let Some(ids) = &node_ids {
        for (v, &g) in graph_of.iter().enumerate() {
            let mut row = vec![0.0; width];
            row[ids[v]] = 1.0;
            attributes[g].push(row);
        }
    }

    let graphs = (0..graphs_n)
        .zip(attributes)
        .map(|(g, attrs)| {
            Ok(LabeledGraph {
                graph: Graph::new(sizes[g], &per_graph[g])?,
                label: class_ids[g],
                attributes: node_ids.as_ref().map(|_| attrs),
            })
        })
        .collect::<Result<Vec<_>, IoError>>()?;
    Ok(TuDataset {
        graphs,
        class_values,
        node_label_values,
        self_loops_dropped: self_loops,
    })
}

/// Loads `<dir>/<name>_*.txt`; the node-label file is optional.
pub fn load_tu_dataset(dir: &Path, name: &str) -> Result<TuDataset, IoError> {
    let path = |suffix: &str| dir.join(format!("{name}_{suffix}.txt"));
    let adjacency = read_text(&path("A"))?;
    let graph_indicator = read_text(&path("graph_indicator"))?;
    let graph_labels = read_text(&path("graph_labels"))?;
    let node_labels = match read_text(&path("node_labels")) {
        Ok(t) => Some(t),
        Err(IoError::MissingFile(_)) => None,
        Err(e) => return Err(e),
    };
    parse_tu_dataset(TuFiles {
        adjacency: &adjacency,
        graph_indicator: &graph_indicator,
        graph_labels: &graph_labels,
        node_labels: node_labels.as_deref(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    // graph 1: triangle on nodes 1-3; graph 2: edge 4-5; graph 3: lone node 6
    const A: &str = "1, 2\r\n2, 1\r\n2, 3\r\n3, 2\r\n1, 3\r\n3, 1\r\n4, 5\r\n5, 4\r\n6, 6\r\n";
    const IND: &str = "1\n1\n1\n2\n2\n3\n";
    const GL: &str = "1\n-1\n1\n";
    const NL: &str = "0\n2\n0\n2\n2\n5\n";

    fn files(node_labels: Option<&'static str>) -> TuFiles<'static> {
        TuFiles {
            adjacency: A,
            graph_indicator: IND,
            graph_labels: GL,
            node_labels,
        }
    }

    #[test]
    fn mini_fixture() {
        let ds = parse_tu_dataset(files(Some(NL))).unwrap();
        assert_eq!(ds.graphs.len(), 3);
        assert_eq!(ds.class_values, [-1, 1]);
        assert_eq!(ds.graphs.iter().map(|g| g.label).collect::<Vec<_>>(), [1, 0, 1]);
        assert_eq!(ds.graphs[0].graph, Graph::new(3, &[(0, 1), (1, 2), (0, 2)]).unwrap());
        assert_eq!(ds.graphs[1].graph, Graph::new(2, &[(0, 1)]).unwrap());
        assert_eq!(ds.graphs[2].graph, Graph::empty(1));
        assert_eq!(ds.self_loops_dropped, 1);
        assert_eq!(ds.node_label_values, [0, 2, 5]);
        let attrs = ds.graphs[0].attributes.as_ref().unwrap();
        assert_eq!(attrs[1], vec![0.0, 1.0, 0.0]);
        assert_eq!(ds.graphs[2].attributes.as_ref().unwrap()[0], vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn without_node_labels() {
        let ds = parse_tu_dataset(files(None)).unwrap();
        assert!(ds.graphs.iter().all(|g| g.attributes.is_none()));
    }

    #[test]
    fn cross_graph_edge() {
        let f = TuFiles {
            adjacency: "1, 4\n",
            ..files(None)
        };
        assert!(matches!(parse_tu_dataset(f), Err(IoError::InconsistentIndicator(_))));
    }

    #[test]
    fn indicator_out_of_range() {
        let f = TuFiles {
            graph_indicator: "1\n1\n1\n2\n2\n4\n",
            ..files(None)
        };
        assert!(matches!(parse_tu_dataset(f), Err(IoError::InconsistentIndicator(_))));
    }

    #[test]
    fn missing_adjacency_file() {
        let dir = tempfile::tempdir().unwrap();
        for (suffix, body) in [("graph_indicator", IND), ("graph_labels", GL)] {
            std::fs::write(dir.path().join(format!("X_{suffix}.txt")), body).unwrap();
        }
        match load_tu_dataset(dir.path(), "X") {
            Err(IoError::MissingFile(p)) => assert!(p.ends_with("X_A.txt")),
            other => panic!("{other:?}"),
        }
        std::fs::write(dir.path().join("X_A.txt"), A).unwrap();
        assert_eq!(load_tu_dataset(dir.path(), "X").unwrap().graphs.len(), 3);
    }
}
