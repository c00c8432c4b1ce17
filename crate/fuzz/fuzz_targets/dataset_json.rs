#![no_main]

use libfuzzer_sys::fuzz_target;
use vnestruct::io::json::{dataset_json, parse_dataset_json};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(ds) = parse_dataset_json(text) {
        let again = parse_dataset_json(&dataset_json(&ds).unwrap()).unwrap();
        assert_eq!(again, ds);
    }
});
