#![no_main]

use libfuzzer_sys::fuzz_target;
use metric_lab::metric::{read_space_json, write_space_json};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(m) = read_space_json(text) {
        let _ = m.validate();
        let mut buf = Vec::new();
        write_space_json(&m, &mut buf).unwrap();
        let again = read_space_json(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(again.len(), m.len());
    }
});
