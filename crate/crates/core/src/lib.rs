//! Structural node embeddings built from Von Neumann entropies of r-hop
//! ego-networks, with the spectral numerics, synthetic role datasets,
//! evaluation metrics, and a sum-pooled graph classifier around them.

pub mod canon;
pub mod embed;
pub mod entropy;
pub mod evalkit;
pub mod experiments;
pub mod graph;
pub mod io;
pub mod random;
pub mod readout;
pub mod spectral;
pub mod synth;

pub use embed::{embed_graph, embed_node, ego_network, EmbeddingConfig, EmbeddingMatrix, EntropyMode};
pub use entropy::{vne_approx, vne_exact, vne_quadratic, EntropyEstimate};
pub use graph::{Graph, GraphError};
