#![no_main]

use intensity_core::temporal::parse_custom_intervals;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(d) = parse_custom_intervals(text, "fuzz") {
            for row in d.rows() {
                let ts = row.start.and_hms_opt(12, 0, 0).unwrap();
                assert!(d.index(&ts) < d.index_range());
            }
        }
    }
});
