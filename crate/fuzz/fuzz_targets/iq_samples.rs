#![no_main]

use libfuzzer_sys::fuzz_target;
use rfdna_core::io::{decode_iq, encode_iq};

fuzz_target!(|data: &[u8]| {
    if let Ok(samples) = decode_iq(data) {
        assert_eq!(encode_iq(&samples).len(), data.len());
    }
});
