#![no_main]

use libfuzzer_sys::fuzz_target;
use somkit::annotations::rasterize_polygon;

fuzz_target!(|data: &[u8]| {
    let [w, h, rest @ ..] = data else { return };
    let points: Vec<f64> = rest
        .chunks_exact(2)
        .map(|c| f64::from(i16::from_le_bytes([c[0], c[1]])) / 64.0)
        .collect();
    let _ = rasterize_polygon(&points, u32::from(*w % 96) + 1, u32::from(*h % 96) + 1);
});
