#![no_main]

use libfuzzer_sys::fuzz_target;
use nagata_core::io::{parse_sample, parse_tree};
use nagata_core::tree::TreePoint;

// Input: tree JSON, a NUL byte, sample JSON.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let (tree_text, sample_text) = text.split_once('\0').unwrap_or((text, "[]"));
    let Ok(tree) = parse_tree(tree_text) else { return };
    let root = TreePoint { node: tree.root(), offset: 0.0 };
    assert_eq!(tree.distance(&root, &root).unwrap(), 0.0);
    let Ok(sample) = parse_sample(sample_text) else { return };
    for a in sample.iter().take(16) {
        let Ok(to_root) = tree.distance(a, &root) else { continue };
        assert!(to_root.is_finite() && to_root >= 0.0);
        for b in sample.iter().take(16) {
            if let (Ok(ab), Ok(ba)) = (tree.distance(a, b), tree.distance(b, a)) {
                assert_eq!(ab, ba);
            }
        }
    }
});
