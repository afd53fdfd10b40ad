//! List-wise accuracy: for a gold listing of N items, M/N where M counts
//! items whose predicted description matches.

mod files;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::listparse::ParsedListing;
use crate::textgen::ListingRecord;

pub use files::{
    load_gold, load_predictions, parse_gold, parse_predictions, score_file, ImageScore, ScoreReport,
};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    #[default]
    LowercaseTrim,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct MatchPolicy {
    pub normalization: Normalization,
    /// Maps a (normalized) name to its canonical category name.
    pub synonyms: BTreeMap<String, String>,
    /// Also count a prediction that contains the gold name.
    pub substring_match: bool,
}

impl Default for MatchPolicy {
    fn default() -> Self {
        MatchPolicy {
            normalization: Normalization::LowercaseTrim,
            synonyms: BTreeMap::new(),
            substring_match: true,
        }
    }
}

impl MatchPolicy {
    /// Exact comparison after normalization only.
    pub fn exact() -> Self {
        MatchPolicy {
            substring_match: false,
            ..Self::default()
        }
    }

    pub fn normalize(&self, s: &str) -> String {
        match self.normalization {
            Normalization::LowercaseTrim => s.trim().to_lowercase(),
        }
    }

    fn canonical(&self, s: &str) -> String {
        let n = self.normalize(s);
        self.synonyms
            .iter()
            .find(|(k, _)| self.normalize(k) == n)
            .map(|(_, v)| self.normalize(v))
            .unwrap_or(n)
    }

    pub fn matches(&self, predicted: &str, gold: &str) -> bool {
        let p = self.canonical(predicted);
        let g = self.canonical(gold);
        if p == g {
            return true;
        }
        if !self.substring_match || g.is_empty() {
            return false;
        }
        p.contains(&g)
            || self
                .synonyms
                .iter()
                .any(|(k, v)| self.normalize(v) == g && p.contains(&self.normalize(k)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ListingScore {
    pub n_correct: u64,
    pub n_total: u64,
}

impl ListingScore {
    pub fn ratio(&self) -> Ratio<u64> {
        Ratio::new(self.n_correct, self.n_total)
    }

    pub fn as_f64(&self) -> f64 {
        self.n_correct as f64 / self.n_total as f64
    }
}

/// Scores one prediction. Matching is by tag id, so prediction order is
/// irrelevant, and a tag id can be credited at most once.
pub fn score_listing(
    pred: &ParsedListing,
    gold: &ListingRecord,
    policy: &MatchPolicy,
) -> Result<ListingScore> {
    if gold.items.is_empty() {
        return Err(Error::EmptyGold);
    }
    let n_correct = gold
        .items
        .iter()
        .filter(|g| {
            pred.get(g.tag_id)
                .is_some_and(|p| policy.matches(&p.description, &g.description))
        })
        .count() as u64;
    Ok(ListingScore {
        n_correct,
        n_total: gold.items.len() as u64,
    })
}

/// Unweighted mean of per-image scores, kept exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeanScore(pub BigRational);

impl MeanScore {
    /// Rounded half up to `decimals` places, as an integer count of units.
    fn scaled(&self, decimals: u32) -> BigInt {
        let scale = BigInt::from(10u64.pow(decimals));
        let num = self.0.numer() * &scale * 2 + self.0.denom();
        num / (self.0.denom() * 2)
    }

    pub fn rounded(&self, decimals: u32) -> f64 {
        self.scaled(decimals).to_f64().unwrap_or(f64::NAN) / 10f64.powi(decimals as i32)
    }

    /// Fixed-point text, e.g. `"0.6667"`.
    pub fn to_decimal_string(&self, decimals: u32) -> String {
        let units = self.scaled(decimals);
        let scale = BigInt::from(10u64.pow(decimals));
        let whole = &units / &scale;
        let frac = &units % &scale;
        format!("{whole}.{:0>width$}", frac.to_string(), width = decimals as usize)
    }
}

pub fn aggregate_scores(scores: &[ListingScore]) -> Result<MeanScore> {
    if scores.is_empty() {
        return Err(Error::EmptyScores);
    }
    let mut sum = BigRational::zero();
    for s in scores {
        sum += BigRational::new(BigInt::from(s.n_correct), BigInt::from(s.n_total));
    }
    Ok(MeanScore(sum / BigInt::from(scores.len())))
}
