#![no_main]

use intensity_core::io::{parse_arrivals, parse_info, write_arrivals};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let info = parse_info("2 7 3 2 1 1\n2 2 2 2 2 2 2 1\n", "info").unwrap();
        if let Ok(entries) = parse_arrivals(text, &info, "fuzz") {
            let out = write_arrivals(&entries);
            assert_eq!(parse_arrivals(&out, &info, "fuzz").unwrap(), entries);
        }
    }
});
