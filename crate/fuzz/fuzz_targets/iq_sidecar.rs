#![no_main]

use libfuzzer_sys::fuzz_target;
use rfdna_core::io::IqSidecar;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(s) = IqSidecar::from_json(text) {
            assert_eq!(IqSidecar::from_json(&s.to_json()).expect("round trip"), s);
        }
    }
});
