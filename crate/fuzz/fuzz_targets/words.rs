#![no_main]

use libfuzzer_sys::fuzz_target;
use metric_lab::boundary::{parse_word, BoundaryPoint};

fuzz_target!(|data: &[u8]| {
    let Some((&rank, rest)) = data.split_first() else { return };
    let Ok(s) = std::str::from_utf8(rest) else { return };
    let rank = 1 + rank as usize % 26;
    if let Ok(w) = parse_word(s, rank) {
        let back = parse_word(&w.to_string(), rank).unwrap();
        assert_eq!(back, w);
        assert_eq!(w.mul(&w.inverse()).len(), 0);
    }
    if let Ok(p) = BoundaryPoint::parse(s, rank) {
        assert_eq!(p.depth(), s.chars().filter(|c| !c.is_whitespace()).count());
    }
});
