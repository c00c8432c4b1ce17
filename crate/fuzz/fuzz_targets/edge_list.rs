#![no_main]

use libfuzzer_sys::fuzz_target;
use vnestruct::io::edgelist::{parse_edge_list, write_edge_list};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(list) = parse_edge_list(text) {
        // whatever parses must survive a save/load round trip
        let saved = write_edge_list(&list.graph, &list.labels).expect("parsed graphs serialize");
        let again = parse_edge_list(&saved).expect("saved edge lists parse");
        assert_eq!(again.graph, list.graph);
        assert_eq!(again.labels, list.labels);
    }
});
