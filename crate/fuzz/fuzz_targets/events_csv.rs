#![no_main]

use intensity_core::events::{parse_events, EventColumns};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let cols = EventColumns::new("date_time", "lat", "long", &["priority"]);
        if let Ok(table) = parse_events(text, "fuzz", &cols) {
            assert_eq!(table.locations().len(), table.len());
        }
    }
});
