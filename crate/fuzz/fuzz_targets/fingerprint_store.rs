#![no_main]

use libfuzzer_sys::fuzz_target;
use rfdna_core::io::{decode_store, encode_store};

fuzz_target!(|data: &[u8]| {
    if let Ok(records) = decode_store(data) {
        let again = encode_store(&records).expect("decoded records re-encode");
        assert_eq!(decode_store(&again).expect("round trip").len(), records.len());
    }
});
