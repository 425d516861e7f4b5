#![no_main]

use libfuzzer_sys::fuzz_target;
use nagata_core::io::decimal_to_rational;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if text.len() > 64 {
        return;
    }
    if let Some(q) = decimal_to_rational(text) {
        let f: f64 = text.parse().expect("accepted decimals parse as f64");
        let negative = q.to_string().starts_with('-');
        assert!(!(f > 0.0 && negative) && !(f < 0.0 && !negative));
    }
});
