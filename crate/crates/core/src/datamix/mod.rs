//! Reproducible mixing of conversation-record datasets.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::jsonio;
use crate::listparse::detect_listing;
use crate::pool;
use crate::textgen::ConversationRecord;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixSource {
    pub label: String,
    /// Relative paths resolve against the recipe file's directory.
    pub path: String,
    /// Records taken from the head of the source; all when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub take: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixRecipe {
    pub sources: Vec<MixSource>,
    #[serde(alias = "seed")]
    pub shuffle_seed: u64,
}

impl MixRecipe {
    pub fn parse(bytes: &[u8]) -> Result<Self> {
        let recipe: MixRecipe = serde_json::from_slice(bytes)
            .map_err(|e| Error::Recipe(format!("invalid recipe: {e}")))?;
        recipe.validate()?;
        Ok(recipe)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&jsonio::read_file(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sources.is_empty() {
            return Err(Error::Recipe("recipe has no sources".into()));
        }
        let mut seen = BTreeSet::new();
        for s in &self.sources {
            if s.label.trim().is_empty() {
                return Err(Error::Recipe("source label must not be empty".into()));
            }
            if !seen.insert(s.label.as_str()) {
                return Err(Error::Recipe(format!("duplicate source label {:?}", s.label)));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    JsonArray,
    Jsonl,
}

impl OutputFormat {
    pub fn encode(self, records: &[Value]) -> Vec<u8> {
        match self {
            OutputFormat::JsonArray => jsonio::to_json_array(records),
            OutputFormat::Jsonl => jsonio::to_jsonl(records),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceCount {
    pub label: String,
    pub path: String,
    pub available: usize,
    pub taken: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MixManifest {
    pub seed: u64,
    pub format: OutputFormat,
    pub sources: Vec<SourceCount>,
    pub total: usize,
    /// sha256 of the output file bytes.
    pub output_digest: String,
    /// sha256 over the sorted per-record digests; independent of the seed.
    pub sorted_records_digest: String,
}

impl MixManifest {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}

/// Result of an in-memory mix, before anything touches disk.
#[derive(Debug, Clone)]
pub struct Mixed {
    pub records: Vec<Value>,
    pub bytes: Vec<u8>,
    pub manifest: MixManifest,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn record_digest(record: &Value) -> String {
    sha256_hex(&serde_json::to_vec(record).expect("value serializes"))
}

/// Digest of the record multiset: per-record digests sorted, one per line.
pub fn sorted_records_digest(records: &[Value]) -> String {
    let mut digests: Vec<String> = records.iter().map(record_digest).collect();
    digests.sort_unstable();
    let mut joined = String::with_capacity(digests.len() * 65);
    for d in &digests {
        joined.push_str(d);
        joined.push('\n');
    }
    sha256_hex(joined.as_bytes())
}

/// Reads a conversation-record file, keeping records verbatim.
pub fn read_conversation_values(path: &Path) -> Result<Vec<Value>> {
    let mut out = Vec::new();
    jsonio::for_each_record_in_file(path, |i, v: Value| {
        let rec: ConversationRecord = serde_json::from_value(v.clone()).map_err(|e| {
            Error::Data(format!("{} record {i}: {e}", path.display()))
        })?;
        rec.validate()?;
        out.push(v);
        Ok(())
    })?;
    Ok(out)
}

fn resolve(base: &Path, p: &str) -> PathBuf {
    let p = Path::new(p);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

/// Concatenates the sources in recipe order (honouring take-counts), then
/// applies a permutation seeded by the recipe.
pub fn mix(recipe: &MixRecipe, base_dir: &Path, format: OutputFormat, jobs: usize) -> Result<Mixed> {
    recipe.validate()?;
    let loaded = pool::map_ordered(&recipe.sources, jobs, |s| {
        read_conversation_values(&resolve(base_dir, &s.path))
    });
    let mut records = Vec::new();
    let mut counts = Vec::with_capacity(recipe.sources.len());
    for (src, data) in recipe.sources.iter().zip(loaded) {
        let data = data?;
        let available = data.len();
        let taken = match src.take {
            Some(n) if n > available => {
                return Err(Error::Recipe(format!(
                    "source {:?} asks for {n} records but has {available}",
                    src.label
                )))
            }
            Some(n) => n,
            None => available,
        };
        records.extend(data.into_iter().take(taken));
        counts.push(SourceCount {
            label: src.label.clone(),
            path: src.path.clone(),
            available,
            taken,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(recipe.shuffle_seed);
    records.shuffle(&mut rng);
    let bytes = format.encode(&records);
    let manifest = MixManifest {
        seed: recipe.shuffle_seed,
        format,
        total: records.len(),
        sources: counts,
        output_digest: sha256_hex(&bytes),
        sorted_records_digest: sorted_records_digest(&records),
    };
    Ok(Mixed {
        records,
        bytes,
        manifest,
    })
}

/// Where the manifest for `output` lives.
pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    output.with_file_name(name)
}

/// Mixes per the recipe file and writes the output plus its manifest.
pub fn mix_to_file(recipe_path: &Path, output: &Path, format: OutputFormat, jobs: usize) -> Result<MixManifest> {
    let recipe = MixRecipe::load(recipe_path)?;
    let base = recipe_path.parent().unwrap_or(Path::new("."));
    let mixed = mix(&recipe, base, format, jobs)?;
    jsonio::write_file(output, &mixed.bytes)?;
    jsonio::write_file(&manifest_path(output), mixed.manifest.to_json().as_bytes())?;
    Ok(mixed.manifest)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub records: usize,
    pub turns: usize,
    /// Records that reference an image.
    pub images: usize,
    /// Assistant turns containing a listing.
    pub listing_turns: usize,
}

impl DatasetStats {
    pub fn add(&mut self, rec: &ConversationRecord) {
        self.records += 1;
        self.turns += rec.conversations.len();
        if !rec.image.trim().is_empty() {
            self.images += 1;
        }
        self.listing_turns += rec
            .assistant_turns()
            .filter(|t| detect_listing(t).has_listing)
            .count();
    }
}

impl std::ops::Add for DatasetStats {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        DatasetStats {
            records: self.records + o.records,
            turns: self.turns + o.turns,
            images: self.images + o.images,
            listing_turns: self.listing_turns + o.listing_turns,
        }
    }
}

pub fn dataset_stats(path: &Path) -> Result<DatasetStats> {
    let mut stats = DatasetStats::default();
    jsonio::for_each_record_in_file(path, |_, rec: ConversationRecord| {
        stats.add(&rec);
        Ok(())
    })?;
    Ok(stats)
}
