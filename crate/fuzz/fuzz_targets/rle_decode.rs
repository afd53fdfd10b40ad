#![no_main]

use libfuzzer_sys::fuzz_target;
use somkit::annotations::{decode_rle, encode_rle};

fuzz_target!(|data: &[u8]| {
    let [h, w, rest @ ..] = data else { return };
    let (h, w) = (u32::from(*h % 64) + 1, u32::from(*w % 64) + 1);
    let counts: Vec<u32> = rest.iter().map(|&b| u32::from(b)).collect();
    if let Ok(mask) = decode_rle((h, w), &counts) {
        let back = decode_rle((h, w), &encode_rle(&mask)).expect("canonical runs decode");
        assert_eq!(back, mask);
    }
});
