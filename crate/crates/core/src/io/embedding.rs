//! Embedding tables.
//!
//! CSV: header `node,h1,...,hR`, then one row per node with every value in
//! `{:.16e}` form (17 significant digits, so values survive a round trip
//! exactly). JSON: the same table plus a provenance block.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{IoError, RunProvenance};
use crate::embed::EmbeddingMatrix;

/// Node names and their embedding rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingFile {
    pub nodes: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<RunProvenance>,
}

impl EmbeddingFile {
    pub fn radius(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    fn validate(&self) -> Result<(), IoError> {
        if self.nodes.len() != self.rows.len() {
            return Err(IoError::Invalid(format!(
                "{} node names for {} rows",
                self.nodes.len(),
                self.rows.len()
            )));
        }
        let r = self.radius();
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != r {
                return Err(IoError::Invalid(format!("row {i} has {} values, expected {r}", row.len())));
            }
            if row.iter().any(|x| !x.is_finite()) {
                return Err(IoError::Invalid(format!("row {i} has a non-finite value")));
            }
        }
        Ok(())
    }
}

/// Node names default to `0..n` when `names` is `None`.
pub fn embedding_csv(m: &EmbeddingMatrix, names: Option<&[String]>) -> String {
    let mut out = String::from("node");
    for r in 1..=m.cols {
        let _ = write!(out, ",h{r}");
    }
    out.push('\n');
    for v in 0..m.rows {
        match names {
            Some(n) => out.push_str(&n[v]),
            None => {
                let _ = write!(out, "{v}");
            }
        }
        for x in m.row(v) {
            let _ = write!(out, ",{x:.16e}");
        }
        out.push('\n');
    }
    out
}

pub fn parse_embedding_csv(text: &str) -> Result<EmbeddingFile, IoError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or(IoError::Empty)?;
    let columns: Vec<&str> = header.trim().split(',').collect();
    if columns.first() != Some(&"node") {
        return Err(IoError::Parse {
            line: 1,
            message: "header must start with `node`".into(),
        });
    }
    for (i, c) in columns[1..].iter().enumerate() {
        if *c != format!("h{}", i + 1) {
            return Err(IoError::Parse {
                line: 1,
                message: format!("column {} should be h{}, found `{c}`", i + 2, i + 1),
            });
        }
    }
    let r = columns.len() - 1;
    let mut file = EmbeddingFile {
        nodes: Vec::new(),
        rows: Vec::new(),
        provenance: None,
    };
    for (i, line) in lines {
        let fields: Vec<&str> = line.trim().split(',').collect();
        if fields.len() != r + 1 {
            return Err(IoError::Parse {
                line: i + 1,
                message: format!("expected {} fields, found {}", r + 1, fields.len()),
            });
        }
        let row = fields[1..]
            .iter()
            .map(|f| f.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| IoError::Parse {
                line: i + 1,
                message: e.to_string(),
            })?;
        if row.iter().any(|x| !x.is_finite()) {
            return Err(IoError::Parse {
                line: i + 1,
                message: "non-finite value".into(),
            });
        }
        file.nodes.push(fields[0].to_string());
        file.rows.push(row);
    }
    Ok(file)
}

pub fn embedding_json(
    m: &EmbeddingMatrix,
    names: Option<&[String]>,
    provenance: RunProvenance,
) -> Result<String, IoError> {
    let file = EmbeddingFile {
        nodes: match names {
            Some(n) => n.to_vec(),
            None => (0..m.rows).map(|v| v.to_string()).collect(),
        },
        rows: m.to_rows(),
        provenance: Some(provenance),
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

pub fn parse_embedding_json(text: &str) -> Result<EmbeddingFile, IoError> {
    let file: EmbeddingFile = serde_json::from_str(text)?;
    file.validate()?;
    Ok(file)
}
