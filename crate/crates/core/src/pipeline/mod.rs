//! Command implementations behind the `somkit` binary.
//!
//! Every command returns a [`RunResult`]: a machine-readable summary plus the
//! per-image failures that did not abort the run.

mod gen;
mod tag;

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::datamix::{self, OutputFormat};
use crate::error::{Error, ErrorClass, Result};
use crate::eval::{score_file, MatchPolicy};
use crate::jsonio;
use crate::listparse::probe_file;
use crate::markalloc::{Granularity, GranularityLevel, TagStyle, DEFAULT_AREA_FRACTIONS};
use crate::textgen::{ClientConfig, PromptMode};

pub use gen::{make_client, run_gen, GenKind};
pub use tag::run_tag;

/// Seed used when neither the config nor the command line sets one.
pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// COCO-style annotation file.
    pub annotations: Option<PathBuf>,
    /// Directory holding the source images named by `file_name`.
    pub images: Option<PathBuf>,
    /// Where `tag` writes tagged PNGs and sidecars.
    pub output_dir: Option<PathBuf>,
    pub level: u8,
    /// Minimum mask area, as a fraction of the image, for levels 1..3.
    pub granularity: [f64; 3],
    pub tag_style: TagStyle,
    pub prompt_mode: PromptMode,
    pub client: ClientConfig,
    pub match_policy: MatchPolicy,
    pub seed: u64,
    pub jobs: usize,
    /// Serve model responses from `<dir>/<bundle hash>.txt` instead of the network.
    pub replay: Option<PathBuf>,
    /// Any per-image failure makes the run fail.
    pub strict: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            annotations: None,
            images: None,
            output_dir: None,
            level: 1,
            granularity: DEFAULT_AREA_FRACTIONS,
            tag_style: TagStyle::default(),
            prompt_mode: PromptMode::TwoShotIcl,
            client: ClientConfig::default(),
            match_policy: MatchPolicy::default(),
            seed: DEFAULT_SEED,
            jobs: 4,
            replay: None,
            strict: false,
        }
    }
}

impl PipelineConfig {
    /// Reads a config file; relative paths inside it resolve against the
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg: PipelineConfig = serde_json::from_slice(&bytes)
            .map_err(|e| Error::Config(format!("invalid config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.annotations, &mut cfg.images, &mut cfg.output_dir, &mut cfg.replay]
            .into_iter()
            .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn granularity_level(&self) -> Result<GranularityLevel> {
        Granularity(self.granularity).level(self.level)
    }

    pub fn validate(&self) -> Result<()> {
        self.granularity_level()?;
        self.tag_style.validate()?;
        if self.jobs == 0 {
            return Err(Error::Config("jobs must be at least 1".into()));
        }
        if self.client.concurrency == 0 {
            return Err(Error::Config("client concurrency must be at least 1".into()));
        }
        Ok(())
    }
}

/// A path the command cannot run without; missing means a config error.
pub fn existing<'a>(path: Option<&'a Path>, what: &str) -> Result<&'a Path> {
    let path = path.ok_or_else(|| Error::Config(format!("no {what} path given")))?;
    if !path.exists() {
        return Err(Error::Config(format!("{what} path {} does not exist", path.display())));
    }
    Ok(path)
}

/// Derives the per-image seed so template choice does not depend on which
/// other images are in the run.
pub fn image_seed(seed: u64, image_id: u64) -> u64 {
    seed ^ image_id.wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub image_id: u64,
    pub class: &'static str,
    pub error: String,
    #[serde(skip)]
    pub kind: ErrorClass,
}

impl Failure {
    pub fn new(image_id: u64, err: &Error) -> Self {
        log::warn!("image {image_id}: {err}");
        Failure {
            image_id,
            class: err.class().name(),
            error: err.to_string(),
            kind: err.class(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub summary: Value,
    pub successes: usize,
    pub failures: Vec<Failure>,
}

impl RunResult {
    pub fn ok(summary: Value) -> Self {
        RunResult {
            summary,
            successes: 0,
            failures: Vec::new(),
        }
    }

    /// 0 unless there were failures and either `strict` is set or nothing
    /// succeeded; then the class of the first failure decides.
    pub fn exit_code(&self, strict: bool) -> i32 {
        match self.failures.first() {
            Some(f) if strict || self.successes == 0 => f.kind.exit_code(),
            _ => 0,
        }
    }
}

/// Writes failures as JSON Lines, or removes a stale file when there are none.
pub fn write_failures(path: &Path, failures: &[Failure]) -> Result<()> {
    if failures.is_empty() {
        return match std::fs::remove_file(path) {
            Err(e) if e.kind() != std::io::ErrorKind::NotFound => Err(Error::io(path, e)),
            _ => Ok(()),
        };
    }
    jsonio::write_file(path, &jsonio::to_jsonl(failures))
}

pub fn run_probe(files: &[PathBuf]) -> Result<RunResult> {
    if files.is_empty() {
        return Err(Error::Config("probe needs at least one file".into()));
    }
    let mut rows = Vec::with_capacity(files.len());
    for f in files {
        let stats = probe_file(f)?;
        rows.push(json!({
            "path": f.display().to_string(),
            "texts": stats.total,
            "listing": stats.listing,
            "percent": stats.percent(),
        }));
    }
    Ok(RunResult {
        successes: rows.len(),
        ..RunResult::ok(json!({ "files": rows }))
    })
}

pub fn run_score(pred: &Path, gold: &Path, policy: &MatchPolicy) -> Result<RunResult> {
    let report = score_file(pred, gold, policy)?;
    let summary = serde_json::to_value(&report).expect("report serializes");
    Ok(RunResult {
        successes: report.n_images,
        ..RunResult::ok(summary)
    })
}

pub fn run_mix(recipe: &Path, output: &Path, format: OutputFormat, jobs: usize) -> Result<RunResult> {
    let manifest = datamix::mix_to_file(recipe, output, format, jobs)?;
    let summary = serde_json::to_value(&manifest).expect("manifest serializes");
    Ok(RunResult {
        successes: manifest.total,
        ..RunResult::ok(summary)
    })
}
