#![no_main]

use libfuzzer_sys::fuzz_target;
use metric_lab::parse::{parse_list, parse_point, parse_positive, parse_real, parse_scales, parse_schedule};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let _ = parse_real(s);
    if let Ok(v) = parse_positive(s) {
        assert!(v > 0.0);
    }
    let _ = parse_list(s);
    let _ = parse_point(s);
    if let Ok(v) = parse_scales(s) {
        assert!(!v.is_empty() && v.len() <= 65 || s.contains(','));
    }
    let levels = data.first().map_or(0, |&b| b as usize % 16);
    let _ = parse_schedule(s, levels);
});
