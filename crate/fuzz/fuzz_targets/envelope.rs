#![no_main]

use libfuzzer_sys::fuzz_target;
use somkit::textgen::parse_envelope;

fuzz_target!(|data: &[u8]| {
    if let Ok(body) = std::str::from_utf8(data) {
        let _ = parse_envelope(body);
    }
});
