#![no_main]

use libfuzzer_sys::fuzz_target;
use vnestruct::io::embedding::parse_embedding_csv;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(file) = parse_embedding_csv(text) {
            assert!(file.rows.iter().flatten().all(|v| v.is_finite()));
        }
    }
});
