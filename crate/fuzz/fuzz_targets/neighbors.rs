#![no_main]

use intensity_core::io::{parse_info, parse_neighbors, write_neighbors};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let info = parse_info("2 7 3 1 1 0\n2 2 2 2 2 2 2\n", "info").unwrap();
        if let Ok(zones) = parse_neighbors(text, &info, "fuzz") {
            let out = write_neighbors(&zones);
            let back = parse_neighbors(&out, &info, "fuzz").unwrap();
            assert_eq!(write_neighbors(&back), out);
        }
    }
});
