#![no_main]

use intensity_core::temporal::parse_timestamp;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = parse_timestamp(text, None);
        if let Some((fmt, value)) = text.split_once('\n') {
            let _ = parse_timestamp(value, Some(fmt));
        }
    }
});
