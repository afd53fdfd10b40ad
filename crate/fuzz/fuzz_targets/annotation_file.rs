#![no_main]

use libfuzzer_sys::fuzz_target;
use somkit::annotations::parse_annotation_file;

fuzz_target!(|data: &[u8]| {
    let Ok(set) = parse_annotation_file(data) else { return };
    for ann in &set.annotations {
        let image = set.image(ann.image_id).expect("validated reference");
        // keep masks small so the fuzzer spends its time on parsing
        if u64::from(image.width) * u64::from(image.height) <= 1 << 16 {
            let _ = ann.to_mask(image);
        }
    }
});
