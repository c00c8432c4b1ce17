#![no_main]

use libfuzzer_sys::fuzz_target;
use vnestruct::io::embedding::parse_embedding_json;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = parse_embedding_json(text);
    }
});
