#![no_main]

use libfuzzer_sys::fuzz_target;
use somkit::jsonio::for_each_record;
use somkit::textgen::{parse_conversation, ConversationRecord};

fuzz_target!(|data: &[u8]| {
    let _ = for_each_record(data, "fuzz", |_, rec: ConversationRecord| rec.validate());
    if let Ok(text) = std::str::from_utf8(data) {
        for (q, a) in parse_conversation(text) {
            assert!(!q.trim().is_empty() && !a.trim().is_empty());
        }
    }
});
