#![no_main]

use libfuzzer_sys::fuzz_target;
use rfdna_core::io::parse_relevance;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(r) = parse_relevance(text, 4) {
            assert_eq!(r.len(), 4);
        }
    }
});
