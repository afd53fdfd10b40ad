use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Placeholder the trainer replaces with image features.
pub const IMAGE_TOKEN: &str = "<image>";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Speaker {
    #[serde(rename = "human", alias = "user")]
    Human,
    #[serde(rename = "gpt", alias = "assistant")]
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Turn {
    pub from: Speaker,
    pub value: String,
}

/// One instruction-tuning sample in the LLaVA conversation layout.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConversationRecord {
    pub id: String,
    pub image: String,
    pub conversations: Vec<Turn>,
}

impl ConversationRecord {
    /// At least two turns, alternating and starting with the human side.
    pub fn validate(&self) -> Result<()> {
        if self.conversations.len() < 2 {
            return Err(Error::Data(format!(
                "record {}: needs at least 2 turns, has {}",
                self.id,
                self.conversations.len()
            )));
        }
        for (i, turn) in self.conversations.iter().enumerate() {
            let expected = if i % 2 == 0 {
                Speaker::Human
            } else {
                Speaker::Assistant
            };
            if turn.from != expected {
                return Err(Error::Data(format!(
                    "record {}: turn {i} should be {expected:?}",
                    self.id
                )));
            }
        }
        Ok(())
    }

    pub fn assistant_turns(&self) -> impl Iterator<Item = &str> {
        self.conversations
            .iter()
            .filter(|t| t.from == Speaker::Assistant)
            .map(|t| t.value.as_str())
    }

    /// Record ids are zero-padded image ids; this recovers the number.
    pub fn image_id(&self) -> Option<u64> {
        self.id.parse().ok()
    }
}

pub fn record_id(image_id: u64) -> String {
    format!("{image_id:012}")
}

/// How a model response becomes turns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exchange<'a> {
    /// One instruction, one answer.
    Listing { instruction: &'a str },
    /// The response is a `Question:` / `Answer:` transcript.
    Dialogue,
}

pub fn to_conversation_record(
    image_id: u64,
    image: &str,
    exchange: Exchange<'_>,
    response: &str,
) -> Result<ConversationRecord> {
    if response.trim().is_empty() {
        return Err(Error::EmptyResponse);
    }
    let pairs = match exchange {
        Exchange::Listing { instruction } => {
            vec![(instruction.trim().to_string(), response.trim().to_string())]
        }
        Exchange::Dialogue => {
            let pairs = parse_conversation(response);
            if pairs.is_empty() {
                return Err(Error::Protocol(format!(
                    "image {image_id}: no question/answer pairs in response"
                )));
            }
            pairs
        }
    };
    let mut conversations = Vec::with_capacity(pairs.len() * 2);
    for (i, (q, a)) in pairs.into_iter().enumerate() {
        let value = if i == 0 {
            format!("{IMAGE_TOKEN}\n{q}")
        } else {
            q
        };
        conversations.push(Turn {
            from: Speaker::Human,
            value,
        });
        conversations.push(Turn {
            from: Speaker::Assistant,
            value: a,
        });
    }
    Ok(ConversationRecord {
        id: record_id(image_id),
        image: image.to_string(),
        conversations,
    })
}

#[derive(Clone, Copy, PartialEq)]
enum Role {
    Question,
    Answer,
}

const QUESTION_LABELS: [&str; 4] = ["question", "q", "human", "user"];
const ANSWER_LABELS: [&str; 5] = ["answer", "a", "assistant", "ai", "gpt"];

fn split_label(line: &str) -> Option<(Role, &str)> {
    let line = line.trim_start_matches(['*', '#', ' ', '-']);
    let colon = line.find(':')?;
    let label = line[..colon].trim().trim_matches('*').to_ascii_lowercase();
    let rest = line[colon + 1..].trim_start_matches('*').trim();
    if QUESTION_LABELS.contains(&label.as_str()) {
        Some((Role::Question, rest))
    } else if ANSWER_LABELS.contains(&label.as_str()) {
        Some((Role::Answer, rest))
    } else {
        None
    }
}

/// Splits a `Question:` / `Answer:` transcript into pairs. Unlabelled lines
/// continue the current turn; a question without an answer is dropped.
pub fn parse_conversation(text: &str) -> Vec<(String, String)> {
    let mut turns: Vec<(Role, String)> = Vec::new();
    for line in text.lines() {
        if let Some((role, rest)) = split_label(line) {
            turns.push((role, rest.to_string()));
        } else if let Some((_, body)) = turns.last_mut() {
            let line = line.trim();
            if !line.is_empty() {
                if !body.is_empty() {
                    body.push('\n');
                }
                body.push_str(line);
            }
        }
    }
    let mut pairs = Vec::new();
    let mut pending: Option<String> = None;
    for (role, body) in turns {
        match role {
            Role::Question => pending = Some(body),
            Role::Answer => {
                if let Some(q) = pending.take() {
                    if !q.is_empty() && !body.is_empty() {
                        pairs.push((q, body));
                    }
                }
            }
        }
    }
    pairs
}
