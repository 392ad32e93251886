#![no_main]

use libfuzzer_sys::fuzz_target;
use rfdna_core::harness::ExperimentConfig;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(c) = ExperimentConfig::from_json(text) {
            assert_eq!(ExperimentConfig::from_json(&c.to_json()).expect("round trip"), c);
        }
    }
});
