//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the report is always printed. Hard
//! criteria make the binary exit nonzero when they fail. The role
//! reproduction (6) and the MUTAG run (11a) are soft: their lines report the
//! measured values but do not fail the suite.
//!
//! `VNESTRUCT_TU_DIR` points the MUTAG check at a directory holding
//! `MUTAG_A.txt` and friends; without it, that line is SKIP.

use std::f64::consts::LN_2;
use std::path::PathBuf;
use std::time::Instant;

use rand::Rng;
use vnestruct::embed::{embed_graph, EmbeddingConfig, EntropyMode};
use vnestruct::entropy::{
    density_lambda_max, density_spectrum, fannes_audenaert_bound, trace_identity_check, vne_estimate_with_exact,
};
use vnestruct::evalkit::METRIC_NAMES;
use vnestruct::experiments::{bench, eval_roles, sweep_noise, SweepConfig};
use vnestruct::graph::Graph;
use vnestruct::io::tu::load_tu_dataset;
use vnestruct::random::{gnp_with_edges, permutation, rng};
use vnestruct::readout::{gradient_check, train, FeatureMatrix, LabeledGraph, ReadoutModel, TrainConfig};
use vnestruct::spectral::{eigs_symmetric, power_iteration_lambda_max, SymmetricMatrix, POWER_MAX_ITERS, POWER_TOL};
use vnestruct::synth::{build_configuration, perturb, triangle_task, Configuration, ShapeDataset, ShapeKind};
use vnestruct::{vne_approx, vne_exact, vne_quadratic};

#[derive(Clone, Copy, PartialEq)]
enum Kind {
    Hard,
    Soft,
}

struct Outcome {
    id: &'static str,
    kind: Kind,
    /// `None` means skipped.
    pass: Option<bool>,
    detail: String,
}

fn outcome(id: &'static str, kind: Kind, pass: bool, detail: String) -> Outcome {
    Outcome { id, kind, pass: Some(pass), detail }
}

/// The 500 graphs shared by criteria 1 and 2.
fn inequality_graphs() -> Vec<Graph> {
    let mut r = rng(1);
    (0..500)
        .map(|i| {
            let n = r.gen_range(2..=64);
            let p = [0.1, 0.3, 0.6][i % 3];
            gnp_with_edges(n, p, &mut r)
        })
        .collect()
}

fn c1_approximation_inequality(graphs: &[Graph]) -> Outcome {
    let start = Instant::now();
    let mut violations = 0;
    let mut equality_mismatch = 0;
    let mut at_one = 0;
    for g in graphs {
        let e = vne_estimate_with_exact(g).unwrap();
        let h = e.h_exact.unwrap();
        if e.h_hat > h + 1e-9 {
            violations += 1;
        }
        let equal = (e.h_hat - h).abs() <= 1e-9;
        let unit = (e.lambda_max - 1.0).abs() <= 1e-9;
        at_one += usize::from(unit);
        if equal != unit {
            equality_mismatch += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        "1",
        Kind::Hard,
        violations == 0 && equality_mismatch == 0 && secs < 30.0,
        format!(
            "H_hat <= H + 1e-9 on {} graphs: {violations} violations, {equality_mismatch} equality/lambda_max=1 mismatches ({at_one} with lambda_max = 1), {secs:.2}s",
            graphs.len()
        ),
    )
}

fn c2_trace_identity(graphs: &[Graph]) -> Outcome {
    let worst = graphs
        .iter()
        .map(|g| {
            let (lhs, rhs) = trace_identity_check(g).unwrap();
            (lhs - rhs).abs()
        })
        .fold(0.0, f64::max);
    outcome("2", Kind::Hard, worst <= 1e-10, format!("max |Tr(rho(I - rho)) - Q| = {worst:.2e}"))
}

/// `B B^T / Tr(B B^T)` with Gaussian-ish entries: PSD with unit trace.
fn random_density(n: usize, r: &mut impl Rng) -> SymmetricMatrix {
    let k = r.gen_range(1..=n);
    let b: Vec<f64> = (0..n * k).map(|_| r.gen_range(-1.0..1.0)).collect();
    let mut m = SymmetricMatrix::from_fn(n, |i, j| (0..k).map(|t| b[i * k + t] * b[j * k + t]).sum());
    let trace = m.trace();
    m = SymmetricMatrix::from_fn(n, |i, j| m.get(i, j) / trace);
    m
}

fn c3_power_iteration() -> Outcome {
    let mut r = rng(3);
    let mut worst_graph = 0.0f64;
    for i in 0..200 {
        let n = r.gen_range(2..=40);
        let g = gnp_with_edges(n, [0.1, 0.3, 0.6][i % 3], &mut r);
        let dense = *density_spectrum(&g).unwrap().last().unwrap();
        worst_graph = worst_graph.max((dense - density_lambda_max(&g).unwrap()).abs());
    }
    let mut worst_general = 0.0f64;
    for _ in 0..200 {
        let n = r.gen_range(1..=40);
        let m = random_density(n, &mut r);
        let dense = *eigs_symmetric(&m).unwrap().eigenvalues.last().unwrap();
        let (power, _) = power_iteration_lambda_max(&m, POWER_TOL, POWER_MAX_ITERS).unwrap();
        worst_general = worst_general.max((dense - power).abs());
    }
    outcome(
        "3",
        Kind::Hard,
        worst_graph.max(worst_general) < 1e-6,
        format!("max |lambda_max power - dense| = {worst_graph:.2e} over 200 graph densities rho(L), {worst_general:.2e} over 200 general PSD unit-trace matrices"),
    )
}

fn c4_perturbation_bound() -> Outcome {
    let mut r = rng(4);
    let mut failures = 0;
    let mut tightest = f64::INFINITY;
    for _ in 0..100 {
        let g = gnp_with_edges(20, 0.3, &mut r);
        let rewired = perturb(&ShapeDataset::unlabeled(g.clone()), 1, r.gen()).unwrap();
        let b = fannes_audenaert_bound(&g, &rewired.graph).unwrap();
        if !b.holds() {
            failures += 1;
        }
        tightest = tightest.min(b.bound - b.delta_h);
    }
    outcome("4", Kind::Hard, failures == 0, format!("100 single rewires (n = 20): {failures} violations, min slack {tightest:.3e}"))
}

fn c5_known_values() -> Outcome {
    let k2 = Graph::new(2, &[(0, 1)]).unwrap();
    let k3 = Graph::new(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
    let s3 = Graph::new(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
    let s3_h = -(2.0 / 3.0) * (2.0f64 / 3.0).ln() - 2.0 * (1.0 / 6.0) * (1.0f64 / 6.0).ln();
    let checks = [
        ("H(K2)", vne_exact(&k2).unwrap(), 0.0),
        ("H(K3)", vne_exact(&k3).unwrap(), LN_2),
        ("Q(K3)", vne_quadratic(&k3).unwrap(), 0.5),
        ("H_hat(K3)", vne_approx(&k3).unwrap().h_hat, -0.5 * 0.5f64.ln()),
        ("H(S3)", vne_exact(&s3).unwrap(), s3_h),
        ("lambda_max(S3)", vne_approx(&s3).unwrap().lambda_max, 2.0 / 3.0),
    ];
    let bad: Vec<String> = checks
        .iter()
        .filter(|(_, got, want)| (got - want).abs() > 1e-9)
        .map(|(name, got, want)| format!("{name} = {got} (want {want})"))
        .collect();
    let s3_matches_quoted = (s3_h - 0.867563).abs() < 5e-7;
    outcome(
        "5",
        Kind::Hard,
        bad.is_empty() && s3_matches_quoted,
        if bad.is_empty() {
            format!("K2, K3, S3 values within 1e-9 (H(S3) = {s3_h:.6})")
        } else {
            bad.join("; ")
        },
    )
}

const ROLE_RADIUS: usize = 4;

fn c6_role_reproduction() -> Outcome {
    let start = Instant::now();
    let house = Configuration::Basic(ShapeKind::House);
    let (mut homogeneity, mut accuracy, mut perturbed) = (Vec::new(), Vec::new(), Vec::new());
    for seed in 0..20u64 {
        let base = build_configuration(&house, 10, 30, seed).unwrap();
        let report = eval_roles(&base, ROLE_RADIUS, EntropyMode::Exact, seed).unwrap();
        homogeneity.push(report.clustering.homogeneity);
        accuracy.push(report.classification.accuracy.mean);
        let noisy = perturb(&base, 10, seed).unwrap();
        perturbed.push(eval_roles(&noisy, ROLE_RADIUS, EntropyMode::Exact, seed).unwrap().classification.accuracy.mean);
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (h, a, p) = (mean(&homogeneity), mean(&accuracy), mean(&perturbed));
    let secs = start.elapsed().as_secs_f64();
    let parts = [("homogeneity", h, 0.90), ("accuracy", a, 0.90), ("accuracy@10 rewired", p, 0.80)];
    let detail = parts
        .iter()
        .map(|(name, v, min)| format!("{name} {v:.3} {} {min:.2}", if v >= min { ">=" } else { "<" }))
        .collect::<Vec<_>>()
        .join(", ");
    outcome(
        "6",
        Kind::Soft,
        parts.iter().all(|(_, v, min)| v >= min) && secs < 300.0,
        format!("basic house, 20 graphs, R = {ROLE_RADIUS}: {detail}, {secs:.1}s"),
    )
}

fn c7_noise_sweep() -> Outcome {
    let sweep = SweepConfig { k_max: 20, trials: 10, radius: ROLE_RADIUS, mode: EntropyMode::Exact, seed: 7 };
    let rows = sweep_noise(&Configuration::Basic(ShapeKind::House), &sweep).unwrap();
    let complete = rows.len() == 21 && rows.iter().enumerate().all(|(k, r)| r.rewired == k && r.metrics.iter().all(|s| s.mean.is_finite()));
    let mut gaps = Vec::new();
    for (m, name) in METRIC_NAMES.iter().enumerate() {
        let first = rows[0].metrics[m].mean;
        let best = rows.iter().map(|r| r.metrics[m].mean).fold(f64::NEG_INFINITY, f64::max);
        gaps.push((name, best - first));
    }
    let ok = complete && gaps.iter().all(|(_, g)| *g <= 0.05);
    let detail = gaps.iter().map(|(n, g)| format!("{n} {g:+.3}")).collect::<Vec<_>>().join(", ");
    outcome("7", Kind::Hard, ok, format!("k = 0..20, 10 trials; max over k minus k = 0: {detail}"))
}

fn c8_isomorphism_invariance() -> Outcome {
    let mut exact_mismatches = 0;
    let mut worst_approx = 0.0f64;
    for seed in 0..50u64 {
        let mut r = rng(800 + seed);
        let n = r.gen_range(2..=40);
        let g = gnp_with_edges(n, [0.1, 0.2, 0.4][seed as usize % 3], &mut r);
        let perm = permutation(n, &mut r);
        let h = g.permuted(&perm).unwrap();
        let cfg = EmbeddingConfig::new(3, EntropyMode::Exact);
        let (a, b) = (embed_graph(&g, &cfg).unwrap(), embed_graph(&h, &cfg).unwrap());
        exact_mismatches += (0..n).filter(|&v| a.row(v) != b.row(perm[v])).count();
        let cfg = EmbeddingConfig::new(3, EntropyMode::Approximate);
        let (a, b) = (embed_graph(&g, &cfg).unwrap(), embed_graph(&h, &cfg).unwrap());
        for v in 0..n {
            for (x, y) in a.row(v).iter().zip(b.row(perm[v])) {
                worst_approx = worst_approx.max((x - y).abs());
            }
        }
    }
    outcome(
        "8",
        Kind::Hard,
        exact_mismatches == 0 && worst_approx <= 1e-9,
        format!("50 relabelled graphs: {exact_mismatches} exact rows differ, approximate max diff {worst_approx:.2e}"),
    )
}

fn c9_gradient_check() -> Outcome {
    let mut worst = 0.0f64;
    // same draws as the readout property tests
    for seed in 0..20u64 {
        let mut r = rng(seed);
        let cols = r.gen_range(1..6);
        let rows = r.gen_range(1..7);
        let classes = r.gen_range(2..4);
        let model = ReadoutModel::new(cols, r.gen_range(2..9), classes, 1, &mut r);
        let fm = FeatureMatrix { rows, cols, data: (0..rows * cols).map(|_| r.gen_range(-1.0..1.0)).collect() };
        worst = worst.max(gradient_check(&model, &fm, r.gen_range(0..classes), 1e-5));
    }
    outcome("9", Kind::Hard, worst < 1e-4, format!("max relative error {worst:.2e} over 20 instances"))
}

fn c10_scaling() -> Outcome {
    let rows = bench(&[1000, 2000, 4000, 8000], EntropyMode::Approximate, 4, 3, 10).unwrap();
    let ratios: Vec<f64> = rows.windows(2).map(|w| w[1].total_seconds / w[0].total_seconds).collect();
    let times = rows.iter().map(|r| format!("{}: {:.3}s", r.nodes, r.total_seconds)).collect::<Vec<_>>().join(", ");
    let ratio_text = ratios.iter().map(|x| format!("x{x:.2}")).collect::<Vec<_>>().join(" ");
    outcome("10", Kind::Hard, ratios.iter().all(|&x| x < 3.0), format!("approximate, R = 4: {times}; per doubling {ratio_text}"))
}

fn c11a_mutag() -> Outcome {
    let Some(dir) = std::env::var_os("VNESTRUCT_TU_DIR").map(PathBuf::from) else {
        return Outcome { id: "11a", kind: Kind::Soft, pass: None, detail: "MUTAG: VNESTRUCT_TU_DIR not set".into() };
    };
    if !dir.join("MUTAG_A.txt").exists() {
        return Outcome { id: "11a", kind: Kind::Soft, pass: None, detail: format!("MUTAG files not found in {}", dir.display()) };
    }
    let data = load_tu_dataset(&dir, "MUTAG").unwrap();
    let (_, report) = train(&data.graphs, &TrainConfig::default()).unwrap();
    outcome(
        "11a",
        Kind::Soft,
        report.accuracy.mean >= 0.80,
        format!("MUTAG ({} graphs) 10-fold accuracy {:.3} +- {:.3}", data.graphs.len(), report.accuracy.mean, report.accuracy.std),
    )
}

fn c11b_triangle_task() -> Outcome {
    let graphs: Vec<LabeledGraph> = triangle_task(50, 0)
        .into_iter()
        .map(|(graph, label)| LabeledGraph { graph, label, attributes: None })
        .collect();
    let cfg = TrainConfig { radii: vec![1, 2], mode: EntropyMode::Exact, seed: 0, ..TrainConfig::default() };
    let (_, report) = train(&graphs, &cfg).unwrap();
    outcome(
        "11b",
        Kind::Hard,
        report.accuracy.mean >= 0.95,
        format!("triangle-free vs triangle, 100 graphs, 10-fold accuracy {:.3} +- {:.3}", report.accuracy.mean, report.accuracy.std),
    )
}

fn main() {
    let graphs = inequality_graphs();
    let checks: Vec<Box<dyn Fn() -> Outcome>> = vec![
        Box::new(|| c1_approximation_inequality(&graphs)),
        Box::new(|| c2_trace_identity(&graphs)),
        Box::new(c3_power_iteration),
        Box::new(c4_perturbation_bound),
        Box::new(c5_known_values),
        Box::new(c6_role_reproduction),
        Box::new(c7_noise_sweep),
        Box::new(c8_isomorphism_invariance),
        Box::new(c9_gradient_check),
        Box::new(c10_scaling),
        Box::new(c11a_mutag),
        Box::new(c11b_triangle_task),
    ];
    let mut hard_failures = 0;
    for check in &checks {
        let o = check();
        let status = match o.pass {
            Some(true) => "PASS",
            Some(false) => "FAIL",
            None => "SKIP",
        };
        let soft = if o.kind == Kind::Soft { " (soft)" } else { "" };
        println!("{status} criterion {}{soft}: {}", o.id, o.detail);
        if o.kind == Kind::Hard && o.pass == Some(false) {
            hard_failures += 1;
        }
    }
    if hard_failures > 0 {
        println!("{hard_failures} hard criteria failed");
        std::process::exit(1);
    }
}
