#![no_main]

use libfuzzer_sys::fuzz_target;
use rfdna_core::svm::{svm_score, SvmModel};

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(model) = SvmModel::from_json(text) {
            let _ = svm_score(&model, &vec![0.5; model.dims()]);
            let _ = model.score_fingerprint(&[0.5; 204]);
        }
    }
});
