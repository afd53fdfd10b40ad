mod common;

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use common::*;
use serde_json::{json, Value};
use somkit::annotations::parse_annotation_file;
use somkit::listparse::parse_listing;
use somkit::markalloc::{tag_image, Granularity, TagStyle};
use somkit::textgen::*;

fn three_category_set() -> somkit::annotations::AnnotationSet {
    parse_annotation_file(&serde_json::to_vec(&annotations_json(&[1])).unwrap()).unwrap()
}

#[test]
fn rule_based_listing_is_canonical_and_round_trips() {
    let set = three_category_set();
    let tagged = tag_image(&set, 1, Granularity::default().level(1).unwrap(), &TagStyle::default(), &source_pixels(64, 48)).unwrap();
    let listing = rule_based_listing(&set, 1, &tagged.placements).unwrap();
    let text = listing.format_text();
    assert_eq!(text, "1. person, 2. cat, 3. dog.");
    assert_eq!(parse_listing(&text).items, listing.items);
}

#[test]
fn prompt_modes_are_structurally_distinct() {
    let img = ImagePayload::from_png(b"\x89PNG fake", 3);
    let zero = build_listing_prompt(img.clone(), PromptMode::ZeroShot, None);
    let improved = build_listing_prompt(img.clone(), PromptMode::ImprovedSysmsg, None);
    let icl = build_listing_prompt(img.clone(), PromptMode::TwoShotIcl, None);
    assert!(zero.exemplars.is_empty() && !zero.system_message.contains(DISTANT_OBJECT_RULE));
    assert!(improved.exemplars.is_empty() && improved.system_message.contains(DISTANT_OBJECT_RULE));
    assert_eq!(icl.exemplars.len(), 2);
    for b in [&zero, &improved, &icl] {
        assert!(b.is_consistent());
    }
    // Exemplar responses are themselves canonical listings.
    for e in &icl.exemplars {
        let parsed = parse_listing(&e.response);
        assert_eq!(parsed.items.len(), e.image.tag_count);
    }
    let hashes = [zero.hash(), improved.hash(), icl.hash()];
    assert!(hashes[0] != hashes[1] && hashes[1] != hashes[2]);
}

struct Echo {
    calls: AtomicUsize,
}

impl Transport for Echo {
    fn post_json(&self, body: &Value) -> Result<HttpReply, TransportFault> {
        let n = self.calls.fetch_add(1, Ordering::SeqCst);
        if n.is_multiple_of(3) {
            return Ok(HttpReply { status: 503, body: String::new() });
        }
        let user = body["messages"].as_array().unwrap().last().unwrap().clone();
        let count = user.to_string().len();
        Ok(HttpReply {
            status: 200,
            body: json!({"choices": [{"message": {"role": "assistant", "content": format!("1. thing {count}")}}]}).to_string(),
        })
    }
}

#[test]
fn batch_submission_keeps_input_order_through_retries() {
    let cfg = ClientConfig { initial_backoff_ms: 0, max_backoff_ms: 0, concurrency: 3, ..Default::default() };
    let transport = Arc::new(Echo { calls: AtomicUsize::new(0) });
    let client = VlmClient::new(cfg, Backend::Live(Box::new(transport.clone())));
    let bundles: Vec<PromptBundle> = (1..=6)
        .map(|n| build_listing_prompt(ImagePayload::from_png(&vec![7u8; n * 10], n), PromptMode::ImprovedSysmsg, None))
        .collect();
    let results = client.submit_all(&bundles);
    assert_eq!(results.len(), 6);
    for (b, r) in bundles.iter().zip(&results) {
        let text = &r.as_ref().unwrap().text;
        let single = VlmClient::new(
            ClientConfig { initial_backoff_ms: 0, max_backoff_ms: 0, ..Default::default() },
            Backend::Live(Box::new(Arc::new(Echo { calls: AtomicUsize::new(1) }))),
        );
        assert_eq!(text, &vlm_submit(b, &single).unwrap());
    }
}

#[test]
fn replay_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let bundle = build_qa_prompt(ImagePayload::from_png(b"png", 2), None);
    std::fs::write(
        dir.path().join(format!("{}.txt", bundle.hash())),
        "Question: What is tag 1?\nAnswer: A dog.\nQuestion: And tag 2?\nAnswer: A ball.",
    )
    .unwrap();
    let client = VlmClient::new(ClientConfig::default(), Backend::Replay(dir.path().to_path_buf()));
    let a = vlm_submit(&bundle, &client).unwrap();
    let b = vlm_submit(&bundle, &client).unwrap();
    assert_eq!(a, b);
    let rec = to_conversation_record(5, "000000000005.png", Exchange::Dialogue, &a).unwrap();
    assert_eq!(rec.conversations.len(), 4);
    rec.validate().unwrap();
}
