#![no_main]

use std::collections::HashSet;

use libfuzzer_sys::fuzz_target;
use somkit::listparse::{detect_listing, parse_listing};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let d = detect_listing(text);
    assert_eq!(d.has_listing, d.item_count >= 2);
    let mut last = 0;
    for &(a, b) in &d.spans {
        assert!(last <= a && a < b && b <= text.len());
        last = b;
    }
    let parsed = parse_listing(text);
    let mut seen = HashSet::new();
    assert!(parsed.items.iter().all(|i| seen.insert(i.tag_id)));
});
