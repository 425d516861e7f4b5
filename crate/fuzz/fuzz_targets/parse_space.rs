#![no_main]

use libfuzzer_sys::fuzz_target;
use nagata_core::io::parse_space;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(input) = parse_space(text) else { return };
    let space = &input.space;
    let n = space.len();
    for i in 0..n {
        assert_eq!(space.d(i, i), 0.0);
        for j in 0..n {
            assert!(space.d(i, j).is_finite() && space.d(i, j) >= 0.0);
            assert_eq!(space.d(i, j), space.d(j, i));
        }
    }
    if n <= 24 {
        let report = input.validate();
        assert!(report.tolerance >= 0.0);
    }
});
