//! End-to-end runs shared by the CLI and the acceptance suite: role
//! evaluation on one dataset, the rewiring noise sweep, and the embedding
//! scaling benchmark.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embed::{embed_graph, embed_graph_timed, EmbedError, EmbeddingConfig, EntropyMode};
use crate::evalkit::{evaluate_roles, EvalError, RoleReport, Summary};
use crate::io::IoError;
use crate::random;
use crate::readout::ReadoutError;
use crate::synth::{build_configuration, perturb, Configuration, ShapeDataset, SynthError};
use crate::synth::{DEFAULT_CYCLE_LEN, DEFAULT_INSTANCES};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Readout(#[from] ReadoutError),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("{0}")]
    Invalid(String),
}

impl RunError {
    /// True when the failure is numerical (an iteration budget ran out)
    /// rather than a problem with the input.
    pub fn is_convergence(&self) -> bool {
        use crate::entropy::EntropyError;
        use crate::spectral::SpectralError;
        let entropy = match self {
            RunError::Embed(EmbedError::Entropy(e)) => e,
            RunError::Readout(ReadoutError::Embed(EmbedError::Entropy(e))) => e,
            _ => return false,
        };
        matches!(entropy, EntropyError::Spectral(SpectralError::NoConvergence(_)))
    }
}

/// Embeds `ds` and scores the embeddings against its role labels.
pub fn eval_roles(ds: &ShapeDataset, radius: usize, mode: EntropyMode, seed: u64) -> Result<RoleReport, RunError> {
    let emb = embed_graph(&ds.graph, &EmbeddingConfig::new(radius, mode))?;
    Ok(evaluate_roles(&emb.to_rows(), &ds.labels, seed)?)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub rewired: usize,
    /// Homogeneity, completeness, silhouette, accuracy, F1, each over trials.
    pub metrics: [Summary; 5],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub k_max: usize,
    pub trials: usize,
    pub radius: usize,
    pub mode: EntropyMode,
    pub seed: u64,
}

/// For each `k` in `0..=k_max`, builds `trials` datasets, rewires `k` edges
/// in each and evaluates. Trial `t` uses the same base graph for every `k`,
/// so rows differ only in the perturbation.
pub fn sweep_noise(config: &Configuration, sweep: &SweepConfig) -> Result<Vec<SweepRow>, RunError> {
    if sweep.trials == 0 {
        return Err(RunError::Invalid("trials must be at least 1".into()));
    }
    let bases = (0..sweep.trials)
        .map(|t| {
            let seed = trial_seed(sweep.seed, t, 0);
            build_configuration(config, DEFAULT_INSTANCES, DEFAULT_CYCLE_LEN, seed)
        })
        .collect::<Result<Vec<_>, _>>()?;
    (0..=sweep.k_max)
        .map(|k| {
            let mut columns: [Vec<f64>; 5] = Default::default();
            for (t, base) in bases.iter().enumerate() {
                let ds = perturb(base, k, trial_seed(sweep.seed, t, 1 + k as u64))?;
                let report = eval_roles(&ds, sweep.radius, sweep.mode, trial_seed(sweep.seed, t, u64::MAX))?;
                for (col, value) in columns.iter_mut().zip(report.metrics()) {
                    col.push(value);
                }
            }
            Ok(SweepRow {
                rewired: k,
                metrics: columns.map(|c| Summary::of(&c)),
            })
        })
        .collect()
}

fn trial_seed(seed: u64, trial: usize, stream: u64) -> u64 {
    use rand::Rng;
    random::substream(seed ^ (trial as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15), stream).gen()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let names = ["homogeneity", "completeness", "silhouette", "accuracy", "f1"];
    let mut out = String::from("k");
    for name in names {
        out.push_str(&format!(",{name}_mean,{name}_std"));
    }
    out.push('\n');
    for row in rows {
        out.push_str(&row.rewired.to_string());
        for s in &row.metrics {
            out.push_str(&format!(",{:.17e},{:.17e}", s.mean, s.std));
        }
        out.push('\n');
    }
    out
}

/// Means over the graphs timed at one size.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchRow {
    pub nodes: usize,
    pub graphs: usize,
    pub edges: f64,
    pub ego_seconds: f64,
    pub entropy_seconds: f64,
    pub total_seconds: f64,
    pub distinct_ego_networks: f64,
}

pub const BENCH_AVG_DEGREE: f64 = 4.0;

/// Times the embedding of `reps` seeded sparse random graphs per size. Cost
/// varies from graph to graph, so each repetition draws a new one.
pub fn bench(sizes: &[usize], mode: EntropyMode, radius: usize, reps: usize, seed: u64) -> Result<Vec<BenchRow>, RunError> {
    if reps == 0 {
        return Err(RunError::Invalid("reps must be at least 1".into()));
    }
    let cfg = EmbeddingConfig::new(radius, mode);
    sizes
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let mut sums = [0.0; 4];
            for r in 0..reps {
                let stream = (i * reps + r) as u64;
                let g = random::sparse_random(n, BENCH_AVG_DEGREE, &mut random::substream(seed, stream));
                let (_, t) = embed_graph_timed(&g, &cfg)?;
                let values = [g.edge_count() as f64, t.ego_seconds, t.entropy_seconds, t.distinct_ego_networks as f64];
                for (s, v) in sums.iter_mut().zip(values) {
                    *s += v;
                }
            }
            let [edges, ego_seconds, entropy_seconds, distinct] = sums.map(|s| s / reps as f64);
            Ok(BenchRow {
                nodes: n,
                graphs: reps,
                edges,
                ego_seconds,
                entropy_seconds,
                total_seconds: ego_seconds + entropy_seconds,
                distinct_ego_networks: distinct,
            })
        })
        .collect()
}

pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from("nodes,graphs,edges,ego_seconds,entropy_seconds,total_seconds,distinct_ego_networks\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{:.1},{:.6},{:.6},{:.6},{:.1}\n",
            r.nodes, r.graphs, r.edges, r.ego_seconds, r.entropy_seconds, r.total_seconds, r.distinct_ego_networks
        ));
    }
    out
}
