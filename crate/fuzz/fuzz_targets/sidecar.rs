#![no_main]

use libfuzzer_sys::fuzz_target;
use somkit::markalloc::parse_sidecar;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = parse_sidecar(data) {
        let again = parse_sidecar(s.to_json().as_bytes()).expect("serialized sidecar parses");
        assert_eq!(again, s);
    }
});
