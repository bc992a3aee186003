#![no_main]

use intensity_core::io::{parse_cv_weights, write_cv_weights};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(w) = parse_cv_weights(text, "fuzz") {
            let out = write_cv_weights(&w);
            assert_eq!(write_cv_weights(&parse_cv_weights(&out, "fuzz").unwrap()), out);
        }
    }
});
