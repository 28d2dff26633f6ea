#![no_main]

use libfuzzer_sys::fuzz_target;
use metric_lab::fractal::{generator_from_spec, Center};

// Parsing only: sampling a generator is bounded by the mesh, not the input.
fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(g) = generator_from_spec(s) {
        let _ = g.name();
    }
    let _ = Center::parse(s);
});
