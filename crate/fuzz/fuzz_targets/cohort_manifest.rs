#![no_main]

use libfuzzer_sys::fuzz_target;
use rfdna_core::harness::CohortManifest;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(m) = CohortManifest::from_json(text) {
            assert_eq!(CohortManifest::from_json(&m.to_json()).expect("round trip"), m);
        }
    }
});
