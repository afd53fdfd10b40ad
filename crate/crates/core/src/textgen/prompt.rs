use base64::Engine;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::markalloc::TaggedImage;
use crate::error::Result;

pub const DEFAULT_SYSTEM_MESSAGE: &str = "You are a helpful assistant.";

/// The rule added to the system message in every non-zero-shot mode.
pub const DISTANT_OBJECT_RULE: &str = "Do not assign a tag to a distant object, even when that object is easier to describe than the one under the tag.";

pub const IMPROVED_SYSTEM_MESSAGE: &str = "You are a careful visual assistant. The image carries bright numeric tags, each placed on one object or region. For every tag, describe only the object or region directly under that tag, at the tag's own location. Do not assign a tag to a distant object, even when that object is easier to describe than the one under the tag. When a tag sits on background such as sky, water, wall or ground, describe that background. Mention every tag exactly once, in ascending numerical order.";

const ZERO_SHOT_INSTRUCTION: &str = "List the items tagged in the image one by one.";

const QA_INSTRUCTION: &str = "Write a multi-turn conversation between a person asking questions about this photo and an AI assistant answering them. Questions should refer to objects by their numeric tags, and answers must describe what is under the tag being asked about. Put each turn on its own line, starting with 'Question:' or 'Answer:'. Write between two and five question and answer pairs.";

const EXEMPLAR_1_PNG: &[u8] = include_bytes!("../../data/icl/exemplar_1.png");
const EXEMPLAR_1_TEXT: &str = include_str!("../../data/icl/exemplar_1.txt");
const EXEMPLAR_2_PNG: &[u8] = include_bytes!("../../data/icl/exemplar_2.png");
const EXEMPLAR_2_TEXT: &str = include_str!("../../data/icl/exemplar_2.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PromptMode {
    ZeroShot,
    ImprovedSysmsg,
    TwoShotIcl,
}

/// A tagged PNG ready to embed in a request.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImagePayload {
    pub tag_count: usize,
    pub png_base64: String,
}

impl ImagePayload {
    pub fn from_png(png: &[u8], tag_count: usize) -> Self {
        ImagePayload {
            tag_count,
            png_base64: base64::engine::general_purpose::STANDARD.encode(png),
        }
    }

    pub fn from_tagged(tagged: &TaggedImage) -> Result<Self> {
        Ok(Self::from_png(&tagged.to_png()?, tagged.placements.len()))
    }

    pub fn data_url(&self) -> String {
        format!("data:image/png;base64,{}", self.png_base64)
    }

    fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.png_base64.as_bytes()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exemplar {
    pub image: ImagePayload,
    pub user_text: String,
    pub response: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptBundle {
    pub mode: PromptMode,
    pub system_message: String,
    pub exemplars: Vec<Exemplar>,
    pub user_text: String,
    pub image: ImagePayload,
}

impl PromptBundle {
    /// Content hash of everything that determines the model's input.
    /// Images enter through their own digests.
    pub fn hash(&self) -> String {
        let canonical = serde_json::json!({
            "mode": self.mode,
            "system_message": self.system_message,
            "exemplars": self.exemplars.iter().map(|e| serde_json::json!({
                "image": e.image.digest(),
                "user_text": e.user_text,
                "response": e.response,
            })).collect::<Vec<_>>(),
            "user_text": self.user_text,
            "image": self.image.digest(),
        });
        hex::encode(Sha256::digest(canonical.to_string().as_bytes()))
    }

    /// Checks the mode contract: exemplars only (and exactly two) in
    /// two-shot mode; a non-default system message iff not zero-shot.
    pub fn is_consistent(&self) -> bool {
        let exemplars_ok = match self.mode {
            PromptMode::TwoShotIcl => self.exemplars.len() == 2,
            _ => self.exemplars.is_empty(),
        };
        let sysmsg_ok = (self.mode == PromptMode::ZeroShot)
            == (self.system_message == DEFAULT_SYSTEM_MESSAGE);
        exemplars_ok && sysmsg_ok
    }
}

fn listing_instruction(tag_count: usize) -> String {
    format!(
        "This image has {tag_count} numeric tags. List the items they mark one by one, in numerical order, one line per tag, written as '<tag number>. <description>'."
    )
}

/// The two shipped hand-annotated exemplars, as (image, gold listing) pairs.
pub fn icl_exemplars() -> Vec<Exemplar> {
    [(EXEMPLAR_1_PNG, EXEMPLAR_1_TEXT), (EXEMPLAR_2_PNG, EXEMPLAR_2_TEXT)]
        .into_iter()
        .map(|(png, text)| {
            let text = text.trim_end().to_string();
            let tag_count = text.lines().count();
            Exemplar {
                image: ImagePayload::from_png(png, tag_count),
                user_text: listing_instruction(tag_count),
                response: text,
            }
        })
        .collect()
}

/// Listing request for one tagged image. `system_override` replaces the
/// improved system message in the non-zero-shot modes.
pub fn build_listing_prompt(
    image: ImagePayload,
    mode: PromptMode,
    system_override: Option<&str>,
) -> PromptBundle {
    let improved = system_override.unwrap_or(IMPROVED_SYSTEM_MESSAGE).to_string();
    let (system_message, exemplars, user_text) = match mode {
        PromptMode::ZeroShot => (
            DEFAULT_SYSTEM_MESSAGE.to_string(),
            Vec::new(),
            ZERO_SHOT_INSTRUCTION.to_string(),
        ),
        PromptMode::ImprovedSysmsg => (improved, Vec::new(), listing_instruction(image.tag_count)),
        PromptMode::TwoShotIcl => (improved, icl_exemplars(), listing_instruction(image.tag_count)),
    };
    PromptBundle {
        mode,
        system_message,
        exemplars,
        user_text,
        image,
    }
}

/// Multi-turn QA request; uses the improved system message.
pub fn build_qa_prompt(image: ImagePayload, system_override: Option<&str>) -> PromptBundle {
    PromptBundle {
        mode: PromptMode::ImprovedSysmsg,
        system_message: system_override.unwrap_or(IMPROVED_SYSTEM_MESSAGE).to_string(),
        exemplars: Vec::new(),
        user_text: QA_INSTRUCTION.to_string(),
        image,
    }
}
