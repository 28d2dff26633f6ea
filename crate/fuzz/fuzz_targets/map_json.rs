#![no_main]

use libfuzzer_sys::fuzz_target;
use metric_lab::qs::read_map_json;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let _ = read_map_json(s);
});
