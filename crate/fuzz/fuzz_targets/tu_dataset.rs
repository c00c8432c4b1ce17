#![no_main]

use libfuzzer_sys::fuzz_target;
use vnestruct::io::tu::{parse_tu_dataset, TuFiles};

// Input is the four files joined by `|`: adjacency, graph indicator, graph
// labels, and optionally node labels.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let parts: Vec<&str> = text.splitn(4, '|').collect();
    if parts.len() < 3 {
        return;
    }
    let _ = parse_tu_dataset(TuFiles {
        adjacency: parts[0],
        graph_indicator: parts[1],
        graph_labels: parts[2],
        node_labels: parts.get(3).copied(),
    });
});
