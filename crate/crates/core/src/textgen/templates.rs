use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const LISTING_TEMPLATES: &str = include_str!("../../data/listing_templates.txt");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstructionTemplate {
    pub id: u32,
    pub text: String,
}

/// The shipped "list the tagged items" instructions, one per line of the data file.
pub fn listing_templates() -> Vec<InstructionTemplate> {
    parse_templates(LISTING_TEMPLATES)
}

pub fn parse_templates(text: &str) -> Vec<InstructionTemplate> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .enumerate()
        .map(|(i, l)| InstructionTemplate {
            id: i as u32 + 1,
            text: l.to_string(),
        })
        .collect()
}

/// Uniform pick, fixed by `seed`.
pub fn sample_template(templates: &[InstructionTemplate], seed: u64) -> Result<&InstructionTemplate> {
    if templates.is_empty() {
        return Err(Error::EmptyTemplates);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(&templates[rng.random_range(0..templates.len())])
}
