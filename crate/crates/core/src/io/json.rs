//! JSON forms of synthetic datasets and readout checkpoints.

use serde::{Deserialize, Serialize};

use super::IoError;
use crate::graph::Graph;
use crate::readout::{Checkpoint, Mlp};
use crate::synth::{DatasetMeta, ShapeDataset};

/// `{nodes, edges: [[u, v], ...], labels, meta}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetFile {
    pub nodes: usize,
    pub edges: Vec<[usize; 2]>,
    pub labels: Vec<usize>,
    pub meta: DatasetMeta,
}

impl From<&ShapeDataset> for DatasetFile {
    fn from(ds: &ShapeDataset) -> Self {
        DatasetFile {
            nodes: ds.graph.node_count(),
            edges: ds.graph.edges().map(|(u, v)| [u, v]).collect(),
            labels: ds.labels.clone(),
            meta: ds.meta.clone(),
        }
    }
}

pub fn dataset_json(ds: &ShapeDataset) -> Result<String, IoError> {
    Ok(serde_json::to_string_pretty(&DatasetFile::from(ds))?)
}

pub fn parse_dataset_json(text: &str) -> Result<ShapeDataset, IoError> {
    let file: DatasetFile = serde_json::from_str(text)?;
    if file.labels.len() != file.nodes {
        return Err(IoError::Invalid(format!(
            "{} labels for {} nodes",
            file.labels.len(),
            file.nodes
        )));
    }
    let edges: Vec<(usize, usize)> = file.edges.iter().map(|e| (e[0], e[1])).collect();
    let graph = Graph::new(file.nodes, &edges)?;
    Ok(ShapeDataset {
        graph,
        labels: file.labels,
        meta: file.meta,
    })
}

pub fn checkpoint_json(ck: &Checkpoint) -> Result<String, IoError> {
    Ok(serde_json::to_string_pretty(ck)?)
}

fn check_mlp(name: &str, mlp: &Mlp) -> Result<(), IoError> {
    if mlp.layers.is_empty() {
        return Err(IoError::Invalid(format!("{name} has no layers")));
    }
    for (i, l) in mlp.layers.iter().enumerate() {
        let expected = l.inputs.checked_mul(l.outputs);
        if expected != Some(l.weights.len()) || l.bias.len() != l.outputs || l.outputs == 0 {
            return Err(IoError::Invalid(format!("{name} layer {i} has inconsistent shapes")));
        }
        if i > 0 && mlp.layers[i - 1].outputs != l.inputs {
            return Err(IoError::Invalid(format!("{name} layer {i} does not chain")));
        }
        if l.weights.iter().chain(&l.bias).any(|x| !x.is_finite()) {
            return Err(IoError::Invalid(format!("{name} layer {i} has a non-finite parameter")));
        }
    }
    Ok(())
}

/// Parses and checks that every layer shape chains and the metadata fits.
pub fn parse_checkpoint_json(text: &str) -> Result<Checkpoint, IoError> {
    let ck: Checkpoint = serde_json::from_str(text)?;
    check_mlp("phi", &ck.model.phi)?;
    check_mlp("psi", &ck.model.psi)?;
    if ck.model.phi.output_dim() != ck.model.psi.input_dim() {
        return Err(IoError::Invalid("phi output does not match psi input".into()));
    }
    if ck.radius == 0 || ck.attribute_dim.checked_add(ck.radius) != Some(ck.model.input_dim()) {
        return Err(IoError::Invalid(format!(
            "model takes {} inputs, but attributes ({}) plus radius ({}) differ",
            ck.model.input_dim(),
            ck.attribute_dim,
            ck.radius
        )));
    }
    if let Some(s) = &ck.scaler {
        let width = ck.model.input_dim().saturating_sub(s.offset);
        if s.offset > ck.model.input_dim() || s.mean.len() != width || s.std.len() != width {
            return Err(IoError::Invalid("scaler does not match the model input".into()));
        }
    }
    Ok(ck)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::rng;
    use crate::readout::{AttributeMode, ReadoutModel, Scaler};
    use crate::synth::{build_configuration, Configuration, ShapeKind};
    use crate::EntropyMode;

    #[test]
    fn dataset_round_trip() {
        let ds = build_configuration(&Configuration::Basic(ShapeKind::House), 10, 30, 3).unwrap();
        let back = parse_dataset_json(&dataset_json(&ds).unwrap()).unwrap();
        assert_eq!(back, ds);
    }

    #[test]
    fn dataset_rejects_bad_edges() {
        let text = r#"{"nodes": 2, "edges": [[0, 5]], "labels": [0, 0],
            "meta": {"config": "x", "seed": 0, "rewired": 0}}"#;
        assert!(matches!(parse_dataset_json(text), Err(IoError::Graph(_))));
        assert!(matches!(parse_dataset_json("{"), Err(IoError::Json(_))));
    }

    fn checkpoint() -> Checkpoint {
        Checkpoint {
            model: ReadoutModel::new(5, 4, 2, 1, &mut rng(0)),
            radius: 2,
            width: 4,
            attributes: AttributeMode::DegreeOneHot,
            mode: EntropyMode::Exact,
            attribute_dim: 3,
            scaler: Some(Scaler {
                offset: 3,
                mean: vec![0.5, 1.0],
                std: vec![0.1, 0.2],
            }),
        }
    }

    #[test]
    fn checkpoint_round_trip() {
        let ck = checkpoint();
        assert_eq!(parse_checkpoint_json(&checkpoint_json(&ck).unwrap()).unwrap(), ck);
    }

    #[test]
    fn checkpoint_shape_checks() {
        let mut ck = checkpoint();
        ck.model.psi.layers[0].weights.pop();
        assert!(matches!(
            parse_checkpoint_json(&checkpoint_json(&ck).unwrap()),
            Err(IoError::Invalid(_))
        ));
        let mut ck = checkpoint();
        ck.radius = 3;
        assert!(parse_checkpoint_json(&checkpoint_json(&ck).unwrap()).is_err());
    }
}
