#![no_main]

use intensity_core::io::{parse_coefficients, parse_intensities, write_coefficients, write_intensities};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(lambda) = parse_intensities(text, (1, 2, 3), "fuzz") {
            let out = write_intensities(&lambda);
            assert_eq!(write_intensities(&parse_intensities(&out, (1, 2, 3), "fuzz").unwrap()), out);
        }
        if let Ok(beta) = parse_coefficients(text, (1, 2, 2, 2), "fuzz") {
            let out = write_coefficients(&beta);
            assert_eq!(write_coefficients(&parse_coefficients(&out, (1, 2, 2, 2), "fuzz").unwrap()), out);
        }
    }
});
