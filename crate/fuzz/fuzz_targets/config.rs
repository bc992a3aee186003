#![no_main]

use intensity_cli::options::{parse_config, parse_overrides, resolve};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(entries) = parse_config(text, "fuzz") {
            let _ = resolve(&entries, None, &[]);
        }
        let args: Vec<String> = text.split_whitespace().map(String::from).collect();
        if let Ok(over) = parse_overrides(&args) {
            let _ = resolve(&[], None, &over);
        }
    }
});
