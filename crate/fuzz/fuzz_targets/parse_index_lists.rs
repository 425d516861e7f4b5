#![no_main]

use libfuzzer_sys::fuzz_target;
use nagata_core::io::{parse_order, parse_subset};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(set) = parse_subset(text) {
        assert!(set.indices().windows(2).all(|w| w[0] < w[1]));
    }
    let _ = parse_order(text);
});
