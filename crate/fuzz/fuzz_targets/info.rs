#![no_main]

use intensity_core::io::{parse_info, write_info};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(info) = parse_info(text, "fuzz") {
            let out = write_info(&info);
            assert_eq!(parse_info(&out, "fuzz").unwrap(), info);
        }
    }
});
