use std::collections::BTreeMap;
use std::io::BufRead;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{aggregate_scores, score_listing, ListingScore, MatchPolicy};
use crate::error::{Error, Result};
use crate::jsonio;
use crate::listparse::{parse_listing, ListingItem, ParsedListing};
use crate::markalloc::{parse_sidecar, TagSidecar};
use crate::textgen::{ConversationRecord, ListingRecord};

#[derive(Deserialize)]
#[serde(untagged)]
enum GoldLine {
    Sidecar(TagSidecar),
    Listing(ListingRecord),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PredLine {
    Raw { image_id: u64, raw_text: String },
    Items { image_id: u64, items: Vec<ListingItem> },
    Conversation(ConversationRecord),
}

fn insert_unique<V>(map: &mut BTreeMap<u64, V>, id: u64, value: V, what: &str) -> Result<()> {
    if map.insert(id, value).is_some() {
        return Err(Error::Data(format!("duplicate {what} for image {id}")));
    }
    Ok(())
}

fn is_sidecar(path: &Path) -> bool {
    path.file_name()
        .and_then(|n| n.to_str())
        .is_some_and(|n| n.ends_with(".tags.json"))
}

/// Gold listings keyed by image id, from a directory of `.tags.json`
/// sidecars, a single sidecar, or a JSON Lines/array of sidecars or
/// listing records.
pub fn load_gold(path: &Path) -> Result<BTreeMap<u64, ListingRecord>> {
    let mut gold = BTreeMap::new();
    if path.is_dir() {
        let mut entries: Vec<_> = std::fs::read_dir(path)
            .map_err(|e| Error::io(path, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| is_sidecar(p))
            .collect();
        entries.sort();
        for p in entries {
            let sidecar = parse_sidecar(&jsonio::read_file(&p)?)?;
            let rec = ListingRecord::from_sidecar(&sidecar)?;
            insert_unique(&mut gold, rec.image_id, rec, "gold listing")?;
        }
    } else if is_sidecar(path) {
        let sidecar = parse_sidecar(&jsonio::read_file(path)?)?;
        let rec = ListingRecord::from_sidecar(&sidecar)?;
        gold.insert(rec.image_id, rec);
    } else {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        gold = parse_gold(std::io::BufReader::new(file), &path.display().to_string())?;
    }
    Ok(gold)
}

/// Gold listings from a stream of sidecars or listing records.
pub fn parse_gold<R: BufRead>(reader: R, context: &str) -> Result<BTreeMap<u64, ListingRecord>> {
    let mut gold = BTreeMap::new();
    jsonio::for_each_record(reader, context, |_, line: GoldLine| {
        let rec = match line {
            GoldLine::Sidecar(s) => {
                s.validate()?;
                ListingRecord::from_sidecar(&s)?
            }
            GoldLine::Listing(l) => l,
        };
        insert_unique(&mut gold, rec.image_id, rec, "gold listing")
    })?;
    Ok(gold)
}

/// Predictions keyed by image id. Lines may be `{image_id, raw_text}` (parsed
/// as a listing), `{image_id, items}`, or conversation records whose id is
/// the image id; the latter contribute their assistant turns.
pub fn load_predictions(path: &Path) -> Result<BTreeMap<u64, ParsedListing>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_predictions(std::io::BufReader::new(file), &path.display().to_string())
}

/// [`load_predictions`] over any reader; `context` names it in errors.
pub fn parse_predictions<R: BufRead>(reader: R, context: &str) -> Result<BTreeMap<u64, ParsedListing>> {
    let mut preds = BTreeMap::new();
    let n = jsonio::for_each_record(reader, context, |i, line: PredLine| {
        let (id, listing) = match line {
            PredLine::Raw { image_id, raw_text } => (image_id, parse_listing(&raw_text)),
            PredLine::Items { image_id, items } => (image_id, ParsedListing::from_items(items)),
            PredLine::Conversation(rec) => {
                let id = rec.image_id().ok_or_else(|| {
                    Error::Data(format!(
                        "prediction record {i}: id {:?} is not an image id",
                        rec.id
                    ))
                })?;
                let text = rec.assistant_turns().collect::<Vec<_>>().join("\n");
                (id, parse_listing(&text))
            }
        };
        insert_unique(&mut preds, id, listing, "prediction")
    })?;
    if n == 0 {
        return Err(Error::Data(format!("prediction file {context} is empty")));
    }
    Ok(preds)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageScore {
    pub image_id: u64,
    pub n_correct: u64,
    pub n_total: u64,
    /// M/N rounded to 4 decimals.
    pub score: f64,
    pub missing_prediction: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub n_images: usize,
    /// Mean of per-image scores rounded to 4 decimals.
    pub aggregate: f64,
    /// The unrounded mean as `numerator/denominator`.
    pub aggregate_exact: String,
    pub images: Vec<ImageScore>,
}

impl ScoreReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Scores every gold image. Gold images without a prediction score 0; a
/// prediction for an image absent from gold is an error.
pub fn score_file(pred_path: &Path, gold_path: &Path, policy: &MatchPolicy) -> Result<ScoreReport> {
    let preds = load_predictions(pred_path)?;
    let gold = load_gold(gold_path)?;
    if let Some(id) = preds.keys().find(|id| !gold.contains_key(id)) {
        return Err(Error::MissingGold { image_id: *id });
    }
    let empty = ParsedListing::default();
    let mut images = Vec::with_capacity(gold.len());
    let mut scores: Vec<ListingScore> = Vec::with_capacity(gold.len());
    for (id, g) in &gold {
        let pred = preds.get(id);
        let s = score_listing(pred.unwrap_or(&empty), g, policy)?;
        let ratio = super::MeanScore(num_rational::BigRational::new(
            s.n_correct.into(),
            s.n_total.into(),
        ));
        images.push(ImageScore {
            image_id: *id,
            n_correct: s.n_correct,
            n_total: s.n_total,
            score: ratio.rounded(4),
            missing_prediction: pred.is_none(),
        });
        scores.push(s);
    }
    let mean = aggregate_scores(&scores)?;
    Ok(ScoreReport {
        n_images: images.len(),
        aggregate: mean.rounded(4),
        aggregate_exact: format!("{}/{}", mean.0.numer(), mean.0.denom()),
        images,
    })
}
