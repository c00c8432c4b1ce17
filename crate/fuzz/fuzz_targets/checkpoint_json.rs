#![no_main]

use libfuzzer_sys::fuzz_target;
use vnestruct::io::json::parse_checkpoint_json;
use vnestruct::readout::FeatureMatrix;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    // a checkpoint that validates must be usable for inference
    if let Ok(ck) = parse_checkpoint_json(text) {
        let cols = ck.model.input_dim();
        let fm = FeatureMatrix { rows: 2, cols, data: vec![0.5; 2 * cols] };
        let _ = vnestruct::readout::forward(&ck.model, &fm);
    }
});
