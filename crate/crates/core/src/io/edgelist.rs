//! Whitespace-separated edge lists with arbitrary node labels.
//!
//! ```text
//! # comment
//! a b
//! b c
//! d          <- a lone label declares an isolated node
//! ```
//!
//! Labels get dense ids in order of first appearance. A repeated pair (in
//! either orientation) is kept once and counted in `duplicates`.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use super::{read_text, write_text, IoError};
use crate::graph::Graph;

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeList {
    pub graph: Graph,
    /// `labels[id]` is the text label of node `id`.
    pub labels: Vec<String>,
    pub duplicates: usize,
}

pub fn parse_edge_list(text: &str) -> Result<EdgeList, IoError> {
    let mut ids: HashMap<&str, usize> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    let mut edges = Vec::new();
    let mut duplicates = 0;
    fn intern<'a>(ids: &mut HashMap<&'a str, usize>, labels: &mut Vec<String>, label: &'a str) -> usize {
        *ids.entry(label).or_insert_with(|| {
            labels.push(label.to_string());
            labels.len() - 1
        })
    }
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        match tokens.as_slice() {
            [] => {}
            [a] => {
                intern(&mut ids, &mut labels, a);
            }
            [a, b] => {
                if a == b {
                    return Err(IoError::Parse {
                        line: line_no,
                        message: format!("self-loop on `{a}`"),
                    });
                }
                let u = intern(&mut ids, &mut labels, a);
                let v = intern(&mut ids, &mut labels, b);
                if seen.insert((u.min(v), u.max(v))) {
                    edges.push((u, v));
                } else {
                    duplicates += 1;
                }
            }
            _ => {
                return Err(IoError::Parse {
                    line: line_no,
                    message: format!("expected `u v`, found {} fields", tokens.len()),
                })
            }
        }
    }
    if labels.is_empty() {
        return Err(IoError::Empty);
    }
    let graph = Graph::new(labels.len(), &edges)?;
    Ok(EdgeList {
        graph,
        labels,
        duplicates,
    })
}

pub fn load_edge_list(path: &Path) -> Result<EdgeList, IoError> {
    parse_edge_list(&read_text(path)?)
}

/// Serializes so that parsing gives back the same ids: every node is
/// declared once in id order, then edges follow.
pub fn write_edge_list(graph: &Graph, labels: &[String]) -> Result<String, IoError> {
    if labels.len() != graph.node_count() {
        return Err(IoError::Invalid(format!(
            "{} labels for {} nodes",
            labels.len(),
            graph.node_count()
        )));
    }
    let mut distinct = HashSet::new();
    for l in labels {
        if l.is_empty() || l.contains(char::is_whitespace) || l.contains('#') || !distinct.insert(l) {
            return Err(IoError::Invalid(format!("label `{l}` is empty, repeated, or unwritable")));
        }
    }
    let mut out = format!("# {} nodes, {} edges\n", graph.node_count(), graph.edge_count());
    for l in labels {
        out.push_str(l);
        out.push('\n');
    }
    for (u, v) in graph.edges() {
        let _ = writeln!(out, "{} {}", labels[u], labels[v]);
    }
    Ok(out)
}

/// Saves with labels `0..n` when `labels` is `None`.
pub fn save_edge_list(path: &Path, graph: &Graph, labels: Option<&[String]>) -> Result<(), IoError> {
    let default: Vec<String>;
    let labels = match labels {
        Some(l) => l,
        None => {
            default = (0..graph.node_count()).map(|v| v.to_string()).collect();
            &default
        }
    };
    write_text(path, &write_edge_list(graph, labels)?)
}
