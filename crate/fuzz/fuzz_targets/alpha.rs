#![no_main]

use intensity_core::io::{parse_alpha, write_alpha};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(alpha) = parse_alpha(text, 3, "fuzz") {
            let out = write_alpha(&alpha);
            assert_eq!(write_alpha(&parse_alpha(&out, 3, "fuzz").unwrap()), out);
        }
    }
});
