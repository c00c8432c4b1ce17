//! `vnestruct` command-line tool.
//!
//! Exit codes: 0 on success, 1 on bad input, 2 when a numerical routine ran
//! out of iterations.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use vnestruct::embed::{embed_graph, graph_hash, EmbeddingConfig, EntropyMode};
use vnestruct::evalkit::{format_table, RoleReport};
use vnestruct::experiments::{bench, bench_csv, eval_roles, sweep_csv, sweep_noise, RunError, SweepConfig};
use vnestruct::io::edgelist::load_edge_list;
use vnestruct::io::embedding::{embedding_csv, embedding_json};
use vnestruct::io::json::{checkpoint_json, dataset_json, parse_dataset_json};
use vnestruct::io::tu::load_tu_dataset;
use vnestruct::io::{read_text, sidecar_path, write_text, IoError, RunProvenance};
use vnestruct::readout::{train, AttributeMode, Checkpoint, TrainConfig, TrainReport};
use vnestruct::synth::{build_configuration, perturb, Configuration, DEFAULT_CYCLE_LEN, DEFAULT_INSTANCES};

#[derive(Parser)]
#[command(name = "vnestruct", version, about = "Structural node embeddings from ego-network entropies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Embed every node of an edge-list graph.
    Embed(EmbedArgs),
    /// Generate a synthetic structural-role dataset.
    Synth(SynthArgs),
    /// Embed a dataset, then cluster and classify its nodes by role.
    EvalRoles(EvalRolesArgs),
    /// Role metrics as a function of the number of rewired edges.
    SweepNoise(SweepArgs),
    /// Cross-validated graph classification on a TU dataset.
    ClassifyGraphs(ClassifyArgs),
    /// Embedding wall time on random sparse graphs of growing size.
    Bench(BenchArgs),
}

#[derive(Args, Serialize)]
struct EmbedArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 4)]
    radius: usize,
    #[arg(long, default_value = "exact")]
    mode: EntropyMode,
    /// Z-score each column.
    #[arg(long)]
    standardize: bool,
    #[arg(long, default_value = "csv", value_parser = ["csv", "json"])]
    format: String,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Serialize)]
struct SynthArgs {
    #[arg(long, default_value = "basic-house")]
    #[serde(serialize_with = "as_display")]
    config: Configuration,
    /// Number of edges to rewire.
    #[arg(long, default_value_t = 0)]
    perturb: usize,
    #[arg(long, default_value_t = DEFAULT_INSTANCES)]
    instances: usize,
    #[arg(long, default_value_t = DEFAULT_CYCLE_LEN)]
    cycle_len: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct EvalRolesArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long, default_value_t = 4)]
    radius: usize,
    #[arg(long, default_value = "exact")]
    mode: EntropyMode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct SweepArgs {
    #[arg(long, default_value = "basic-house")]
    #[serde(serialize_with = "as_display")]
    config: Configuration,
    #[arg(long, default_value_t = 20)]
    k_max: usize,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 4)]
    radius: usize,
    #[arg(long, default_value = "exact")]
    mode: EntropyMode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV output; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct ClassifyArgs {
    #[arg(long)]
    tu_dir: PathBuf,
    #[arg(long)]
    name: String,
    #[arg(long, default_value_t = 10)]
    folds: usize,
    #[arg(long, default_value_t = 300)]
    epochs: usize,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
    radii: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "8,16,32")]
    widths: Vec<usize>,
    /// given, degree or none.
    #[arg(long, default_value = "given")]
    attributes: AttributeMode,
    #[arg(long, default_value = "auto")]
    mode: EntropyMode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// JSON report; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Where to save the model fitted on the whole dataset.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct BenchArgs {
    /// Comma-separated node counts; a `k` suffix multiplies by 1000.
    #[arg(long, value_delimiter = ',', value_parser = parse_size, default_value = "1k,2k,4k,8k")]
    sizes: Vec<usize>,
    #[arg(long, default_value = "approx")]
    mode: EntropyMode,
    #[arg(long, default_value_t = 4)]
    radius: usize,
    /// Random graphs timed per size; rows report the means.
    #[arg(long, default_value_t = 3)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn as_display<T: std::fmt::Display, S: serde::Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn parse_size(s: &str) -> Result<usize, String> {
    let (digits, scale) = match s.strip_suffix(['k', 'K']) {
        Some(d) => (d, 1000),
        None => (s, 1),
    };
    let n: usize = digits.trim().parse().map_err(|_| format!("bad size `{s}`"))?;
    if n * scale < 2 {
        return Err(format!("size `{s}` must be at least 2"));
    }
    Ok(n * scale)
}

enum Failure {
    Input(String),
    Convergence(String),
}

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        if e.is_convergence() {
            Failure::Convergence(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Failure::Input(e.to_string())
    }
}

macro_rules! run_err {
    ($($t:ty),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                RunError::from(e).into()
            }
        }
    )*};
}
run_err!(
    vnestruct::embed::EmbedError,
    vnestruct::synth::SynthError,
    vnestruct::evalkit::EvalError,
    vnestruct::readout::ReadoutError
);

fn options<T: Serialize>(args: &T) -> serde_json::Value {
    serde_json::to_value(args).unwrap_or(serde_json::Value::Null)
}

/// Writes `text` to `out`, or stdout. Provenance goes to the sidecar file,
/// or stderr alongside stdout output.
fn emit(out: Option<&Path>, text: &str, prov: &RunProvenance) -> Result<(), Failure> {
    let prov_text = serde_json::to_string_pretty(prov).map_err(|e| Failure::Input(e.to_string()))?;
    match out {
        Some(path) => {
            write_text(path, text)?;
            write_text(&sidecar_path(path), &format!("{prov_text}\n"))?;
        }
        None => {
            print!("{text}");
            eprintln!("{prov_text}");
        }
    }
    Ok(())
}

fn run_embed(a: &EmbedArgs) -> Result<(), Failure> {
    let list = load_edge_list(&a.input)?;
    let cfg = EmbeddingConfig { max_radius: a.radius, mode: a.mode, standardize: a.standardize };
    let m = embed_graph(&list.graph, &cfg)?;
    let mut prov = RunProvenance::new("embed", Some(a.seed), options(a));
    prov.input_hash = Some(graph_hash(&list.graph));
    if list.duplicates > 0 {
        eprintln!("warning: {} duplicate edges collapsed", list.duplicates);
    }
    if a.format == "json" {
        let text = embedding_json(&m, Some(&list.labels), prov.clone())?;
        emit(a.out.as_deref(), &format!("{text}\n"), &prov)
    } else {
        emit(a.out.as_deref(), &embedding_csv(&m, Some(&list.labels)), &prov)
    }
}

fn run_synth(a: &SynthArgs) -> Result<(), Failure> {
    let base = build_configuration(&a.config, a.instances, a.cycle_len, a.seed)?;
    let ds = perturb(&base, a.perturb, a.seed)?;
    let mut prov = RunProvenance::new("synth", Some(a.seed), options(a));
    prov.input_hash = Some(graph_hash(&ds.graph));
    emit(a.out.as_deref(), &format!("{}\n", dataset_json(&ds)?), &prov)
}

#[derive(Serialize)]
struct RoleOutput<'a> {
    report: &'a RoleReport,
    provenance: &'a RunProvenance,
}

fn run_eval_roles(a: &EvalRolesArgs) -> Result<(), Failure> {
    let ds = parse_dataset_json(&read_text(&a.dataset)?)?;
    let report = eval_roles(&ds, a.radius, a.mode, a.seed)?;
    let mut prov = RunProvenance::new("eval-roles", Some(a.seed), options(a));
    prov.input_hash = Some(graph_hash(&ds.graph));
    println!("{}", format_table(&[(ds.meta.config.clone(), report.metrics())]));
    if let Some(out) = &a.out {
        let body = RoleOutput { report: &report, provenance: &prov };
        let text = serde_json::to_string_pretty(&body).map_err(|e| Failure::Input(e.to_string()))?;
        write_text(out, &format!("{text}\n"))?;
    }
    Ok(())
}

fn run_sweep(a: &SweepArgs) -> Result<(), Failure> {
    let sweep = SweepConfig { k_max: a.k_max, trials: a.trials, radius: a.radius, mode: a.mode, seed: a.seed };
    let rows = sweep_noise(&a.config, &sweep)?;
    let prov = RunProvenance::new("sweep-noise", Some(a.seed), options(a));
    emit(a.out.as_deref(), &sweep_csv(&rows), &prov)
}

#[derive(Serialize)]
struct ClassifyOutput<'a> {
    dataset: &'a str,
    graphs: usize,
    classes: usize,
    report: &'a TrainReport,
    provenance: &'a RunProvenance,
}

fn run_classify(a: &ClassifyArgs) -> Result<(), Failure> {
    let data = load_tu_dataset(&a.tu_dir, &a.name)?;
    let cfg = TrainConfig {
        folds: a.folds,
        epochs: a.epochs,
        radii: a.radii.clone(),
        widths: a.widths.clone(),
        attributes: a.attributes,
        mode: a.mode,
        seed: a.seed,
        ..TrainConfig::default()
    };
    let (checkpoint, report): (Checkpoint, TrainReport) = train(&data.graphs, &cfg)?;
    let prov = RunProvenance::new("classify-graphs", Some(a.seed), options(a));
    eprintln!(
        "{}: accuracy {:.4} +- {:.4} over {} folds (radius {}, width {})",
        a.name,
        report.accuracy.mean,
        report.accuracy.std,
        report.folds.len(),
        report.radius,
        report.width
    );
    if let Some(path) = &a.checkpoint {
        write_text(path, &format!("{}\n", checkpoint_json(&checkpoint)?))?;
    }
    let body = ClassifyOutput {
        dataset: &a.name,
        graphs: data.graphs.len(),
        classes: data.classes(),
        report: &report,
        provenance: &prov,
    };
    let text = serde_json::to_string_pretty(&body).map_err(|e| Failure::Input(e.to_string()))?;
    match &a.out {
        Some(path) => write_text(path, &format!("{text}\n"))?,
        None => println!("{text}"),
    }
    Ok(())
}

fn run_bench(a: &BenchArgs) -> Result<(), Failure> {
    let rows = bench(&a.sizes, a.mode, a.radius, a.reps, a.seed)?;
    let prov = RunProvenance::new("bench", Some(a.seed), options(a));
    for pair in rows.windows(2) {
        eprintln!(
            "n {} -> {}: time x{:.2}",
            pair[0].nodes,
            pair[1].nodes,
            pair[1].total_seconds / pair[0].total_seconds.max(1e-12)
        );
    }
    emit(a.out.as_deref(), &bench_csv(&rows), &prov)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Embed(a) => run_embed(a),
        Command::Synth(a) => run_synth(a),
        Command::EvalRoles(a) => run_eval_roles(a),
        Command::SweepNoise(a) => run_sweep(a),
        Command::ClassifyGraphs(a) => run_classify(a),
        Command::Bench(a) => run_bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Convergence(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
