use std::time::Instant;

use rand::Rng;
use vnestruct::embed::{embed_graph, embed_node, ego_network, EmbeddingConfig, EntropyMode};
use vnestruct::graph::Graph;
use vnestruct::random::{gnp, permutation, rng, sparse_random};
use vnestruct::synth::{build_configuration, Configuration, ShapeKind};

fn random_graph(seed: u64) -> Graph {
    let mut r = rng(seed);
    let n = r.gen_range(2..40);
    let p = [0.05, 0.1, 0.2, 0.4][r.gen_range(0..4)];
    gnp(n, p, &mut r)
}

#[test]
fn embeddings_are_isomorphism_invariant() {
    for seed in 0..50u64 {
        let g = random_graph(seed);
        let perm = permutation(g.node_count(), &mut rng(seed + 1000));
        let h = g.permuted(&perm).unwrap();
        for mode in [EntropyMode::Exact, EntropyMode::Approximate] {
            let cfg = EmbeddingConfig::new(3, mode);
            let a = embed_graph(&g, &cfg).unwrap();
            let b = embed_graph(&h, &cfg).unwrap();
            for v in 0..g.node_count() {
                if mode == EntropyMode::Exact {
                    assert_eq!(a.row(v), b.row(perm[v]), "seed {seed} node {v}");
                } else {
                    for (x, y) in a.row(v).iter().zip(b.row(perm[v])) {
                        assert!((x - y).abs() <= 1e-9, "seed {seed} node {v}: {x} vs {y}");
                    }
                }
            }
        }
    }
}

#[test]
fn approximate_never_exceeds_exact_per_radius() {
    for seed in 0..30u64 {
        let g = random_graph(seed);
        let e = embed_graph(&g, &EmbeddingConfig::new(3, EntropyMode::Exact)).unwrap();
        let a = embed_graph(&g, &EmbeddingConfig::new(3, EntropyMode::Approximate)).unwrap();
        for (x, y) in a.data.iter().zip(&e.data) {
            assert!(*x <= y + 1e-9);
            assert!(x.is_finite() && *x >= 0.0);
        }
    }
}

#[test]
fn edits_outside_the_ball_do_not_matter() {
    let mut r = rng(5);
    for _ in 0..30 {
        let g = sparse_random(60, 2.5, &mut r);
        let v = r.gen_range(0..60);
        let radius = 2;
        let ball = g.bfs_ball(v, radius);
        let outside: Vec<usize> = (0..60).filter(|u| ball.binary_search(u).is_err()).collect();
        if outside.len() < 2 {
            continue;
        }
        // add every absent edge among a few outside nodes, drop outside-only edges
        let mut edges: Vec<_> = g
            .edges()
            .filter(|(a, b)| ball.binary_search(a).is_ok() || ball.binary_search(b).is_ok())
            .collect();
        for w in outside.windows(2).take(5) {
            edges.push((w[0], w[1]));
        }
        edges.sort_unstable();
        edges.dedup();
        let edited = Graph::new(60, &edges).unwrap();
        let cfg = EmbeddingConfig::new(radius, EntropyMode::Exact);
        assert_eq!(
            embed_node(&g, v, &cfg).unwrap(),
            embed_node(&edited, v, &cfg).unwrap()
        );
    }
}

#[test]
fn house_apexes_share_rows() {
    let ds = build_configuration(&Configuration::Basic(ShapeKind::House), 10, 30, 0).unwrap();
    let apexes: Vec<usize> = (0..10).map(|i| 30 + 5 * i + 4).collect();
    // apex ego-network at radius 1 is the roof triangle
    let ego = ego_network(&ds.graph, apexes[0], 1).unwrap();
    assert_eq!((ego.graph.node_count(), ego.graph.edge_count()), (3, 3));
    for r in 1..=4 {
        let m = embed_graph(&ds.graph, &EmbeddingConfig::new(r, EntropyMode::Exact)).unwrap();
        for &a in &apexes[1..] {
            assert_eq!(m.row(a), m.row(apexes[0]));
        }
    }
}

#[test]
fn parallel_and_sequential_agree() {
    let g = sparse_random(300, 4.0, &mut rng(11));
    let cfg = EmbeddingConfig::new(3, EntropyMode::Auto);
    let par = embed_graph(&g, &cfg).unwrap();
    let seq: Vec<f64> = (0..300)
        .flat_map(|v| embed_node(&g, v, &cfg).unwrap().values)
        .collect();
    assert_eq!(par.data, seq);
}

#[test]
fn standardized_columns_have_zero_mean() {
    let ds = build_configuration(&Configuration::Basic(ShapeKind::House), 10, 30, 0).unwrap();
    let cfg = EmbeddingConfig {
        standardize: true,
        ..EmbeddingConfig::new(3, EntropyMode::Exact)
    };
    let m = embed_graph(&ds.graph, &cfg).unwrap();
    for c in 0..3 {
        let mean: f64 = (0..m.rows).map(|v| m.row(v)[c]).sum::<f64>() / m.rows as f64;
        assert!(mean.abs() < 1e-12);
    }
}

#[test]
fn approximate_mode_scales_roughly_linearly() {
    // small sizes only; the acceptance suite runs the full 1k..8k sweep
    let cfg = EmbeddingConfig::new(2, EntropyMode::Approximate);
    let time = |n: usize| {
        let g = sparse_random(n, 4.0, &mut rng(n as u64));
        (0..3)
            .map(|_| {
                let t = Instant::now();
                embed_graph(&g, &cfg).unwrap();
                t.elapsed().as_secs_f64()
            })
            .fold(f64::INFINITY, f64::min)
    };
    let small = time(2000);
    let large = time(4000);
    assert!(large / small < 4.0, "{small} -> {large}");
}
