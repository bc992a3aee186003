#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(features) = intensity_core::geojson::parse_features(text) {
            let _ = intensity_core::geojson::merge_areas(&features);
            let _ = intensity_core::geojson::collect_points(&features);
        }
    }
});
