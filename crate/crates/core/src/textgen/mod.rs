//! Listing and QA text for tagged images, and instruction-tuning records.

mod client;
mod conversation;
mod listing;
mod prompt;
mod templates;

pub use client::{
    parse_envelope, Backend, ClientConfig, Completion, HttpReply, HttpTransport, Transport,
    TransportFault, VlmClient,
};
pub use conversation::{
    parse_conversation, record_id, to_conversation_record, ConversationRecord, Exchange, Speaker,
    Turn, IMAGE_TOKEN,
};
pub use listing::{rule_based_listing, ListingRecord};
pub use prompt::{
    build_listing_prompt, build_qa_prompt, icl_exemplars, Exemplar, ImagePayload, PromptBundle,
    PromptMode, DEFAULT_SYSTEM_MESSAGE, DISTANT_OBJECT_RULE, IMPROVED_SYSTEM_MESSAGE,
};
pub use templates::{listing_templates, parse_templates, sample_template, InstructionTemplate};

/// Sends one bundle; the plain-text form of [`VlmClient::submit`].
pub fn vlm_submit(bundle: &PromptBundle, client: &VlmClient) -> crate::Result<String> {
    client.submit(bundle).map(|c| c.text)
}
