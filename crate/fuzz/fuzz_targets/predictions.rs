#![no_main]

use libfuzzer_sys::fuzz_target;
use somkit::eval::{parse_gold, parse_predictions};

fuzz_target!(|data: &[u8]| {
    let _ = parse_predictions(data, "fuzz");
    let _ = parse_gold(data, "fuzz");
});
