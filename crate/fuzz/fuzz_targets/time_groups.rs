#![no_main]

use intensity_core::io::{parse_time_groups, write_time_groups};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = parse_time_groups(text, 14, false, "fuzz");
        if let Ok(groups) = parse_time_groups(text, 14, true, "fuzz") {
            let out = write_time_groups(&groups);
            assert_eq!(write_time_groups(&parse_time_groups(&out, 14, true, "fuzz").unwrap()), out);
        }
    }
});
