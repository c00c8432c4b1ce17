use std::fs;
use std::path::PathBuf;

use proptest::prelude::*;
use vnestruct::io::edgelist::{parse_edge_list, write_edge_list};
use vnestruct::io::embedding::{parse_embedding_csv, parse_embedding_json};
use vnestruct::io::json::{parse_checkpoint_json, parse_dataset_json};
use vnestruct::io::tu::{parse_tu_dataset, TuFiles};

fn tu(text: &str) {
    let parts: Vec<&str> = text.splitn(4, '|').collect();
    if parts.len() >= 3 {
        let _ = parse_tu_dataset(TuFiles {
            adjacency: parts[0],
            graph_indicator: parts[1],
            graph_labels: parts[2],
            node_labels: parts.get(3).copied(),
        });
    }
}

fn corpus(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut seeds: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read_to_string(&p).unwrap()))
        .collect();
    seeds.sort();
    assert!(!seeds.is_empty(), "no seeds for {target}");
    seeds
}

#[test]
fn corpus_seeds_parse_as_named() {
    for (name, text) in corpus("edge_list") {
        assert_eq!(parse_edge_list(&text).is_ok(), name != "self_loop", "{name}");
    }
    let two = &corpus("tu_dataset")[1];
    assert_eq!(two.0, "two_graphs");
    let parts: Vec<&str> = two.1.splitn(4, '|').collect();
    let ds = parse_tu_dataset(TuFiles {
        adjacency: parts[0],
        graph_indicator: parts[1],
        graph_labels: parts[2],
        node_labels: Some(parts[3]),
    })
    .unwrap();
    assert_eq!(ds.graphs.len(), 2);
    for (name, text) in corpus("embedding_csv") {
        assert_eq!(parse_embedding_csv(&text).is_ok(), name != "nan", "{name}");
    }
    for (name, text) in corpus("embedding_json") {
        parse_embedding_json(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
    for (name, text) in corpus("dataset_json") {
        assert_eq!(parse_dataset_json(&text).is_ok(), name != "self_loop", "{name}");
    }
    for (name, text) in corpus("checkpoint_json") {
        assert_eq!(parse_checkpoint_json(&text).is_ok(), name != "bad_radius", "{name}");
    }
}

fn edge_list_text() -> impl Strategy<Value = String> {
    prop::collection::vec(("[a-c0-9]{1,2}", "[a-c0-9]{0,2}", prop::bool::ANY), 0..12).prop_map(|lines| {
        lines
            .into_iter()
            .map(|(u, v, comment)| if comment { format!("# {u}") } else { format!("{u} {v}") })
            .collect::<Vec<_>>()
            .join("\n")
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn parsers_never_panic(text in "\\PC{0,200}") {
        let _ = parse_edge_list(&text);
        tu(&text);
        let _ = parse_embedding_csv(&text);
        let _ = parse_embedding_json(&text);
        let _ = parse_dataset_json(&text);
        let _ = parse_checkpoint_json(&text);
    }

    #[test]
    fn tu_numbers_never_panic(text in "[0-9, \\n|-]{0,120}") {
        tu(&text);
    }

    #[test]
    fn csv_shaped_text_never_panics(text in "node,h1(,h[0-9])?\\n([a-z0-9]{1,3},[-0-9.e]{0,8}(,[-0-9.e]{0,8})?\\n){0,5}") {
        let _ = parse_embedding_csv(&text);
    }

    #[test]
    fn edge_lists_round_trip(text in edge_list_text()) {
        if let Ok(list) = parse_edge_list(&text) {
            let saved = write_edge_list(&list.graph, &list.labels).unwrap();
            let again = parse_edge_list(&saved).unwrap();
            prop_assert_eq!(again.graph, list.graph);
            prop_assert_eq!(again.labels, list.labels);
        }
    }
}
