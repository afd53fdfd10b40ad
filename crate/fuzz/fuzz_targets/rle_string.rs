#![no_main]

use libfuzzer_sys::fuzz_target;
use somkit::annotations::{counts_from_string, counts_to_string};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(counts) = counts_from_string(s) {
        let again = counts_from_string(&counts_to_string(&counts)).expect("re-encoded string parses");
        assert_eq!(again, counts);
    }
});
