use std::path::{Path, PathBuf};

use serde_json::json;

use super::{image_seed, write_failures, Failure, PipelineConfig, RunResult};
use crate::error::{Error, Result};
use crate::jsonio;
use crate::markalloc::{parse_sidecar, TagSidecar};
use crate::pool::map_ordered;
use crate::textgen::{
    build_listing_prompt, build_qa_prompt, listing_templates, sample_template,
    to_conversation_record, Backend, ConversationRecord, Exchange, HttpTransport, ImagePayload,
    ListingRecord, PromptBundle, PromptMode, VlmClient,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenKind {
    /// Listing text straight from the sidecar categories; no model involved.
    RuleListing,
    Listing(PromptMode),
    Qa,
}

impl GenKind {
    fn name(self) -> &'static str {
        match self {
            GenKind::RuleListing => "rule",
            GenKind::Listing(PromptMode::ZeroShot) => "zero_shot",
            GenKind::Listing(PromptMode::ImprovedSysmsg) => "improved_sysmsg",
            GenKind::Listing(PromptMode::TwoShotIcl) => "two_shot_icl",
            GenKind::Qa => "qa",
        }
    }
}

/// Replay directory when configured, otherwise the live endpoint.
pub fn make_client(cfg: &PipelineConfig) -> Result<VlmClient> {
    let backend = match &cfg.replay {
        Some(dir) if dir.is_dir() => Backend::Replay(dir.clone()),
        Some(dir) => {
            return Err(Error::Config(format!(
                "replay directory {} does not exist",
                dir.display()
            )))
        }
        None => Backend::Live(Box::new(HttpTransport::from_config(&cfg.client)?)),
    };
    Ok(VlmClient::new(cfg.client.clone(), backend))
}

fn load_sidecars(dir: &Path) -> Result<Vec<TagSidecar>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.ends_with(".tags.json"))
        })
        .collect();
    paths.sort();
    let mut sidecars = paths
        .iter()
        .map(|p| {
            let s = parse_sidecar(&jsonio::read_file(p)?)?;
            s.validate()?;
            Ok(s)
        })
        .collect::<Result<Vec<_>>>()?;
    sidecars.sort_by_key(|s| s.image_id);
    if let Some(w) = sidecars.windows(2).find(|w| w[0].image_id == w[1].image_id) {
        return Err(Error::Data(format!("two sidecars for image {}", w[0].image_id)));
    }
    Ok(sidecars)
}

fn bundle_for(kind: GenKind, cfg: &PipelineConfig, dir: &Path, s: &TagSidecar) -> Result<PromptBundle> {
    let path = dir.join(&s.tagged_image);
    let png = std::fs::read(&path).map_err(|e| Error::io(&path, e))?;
    let image = ImagePayload::from_png(&png, s.placements.len());
    let sys = cfg.client.system_message.as_deref();
    Ok(match kind {
        GenKind::Qa => build_qa_prompt(image, sys),
        GenKind::Listing(mode) => build_listing_prompt(image, mode, sys),
        GenKind::RuleListing => unreachable!("rule listings need no prompt"),
    })
}

/// Generates one conversation record per sidecar in `tags_dir` and writes
/// them as JSON Lines ordered by image id. Per-image failures go to
/// `<output>.failures.jsonl`. `client` is required for model-backed kinds.
pub fn run_gen(
    cfg: &PipelineConfig,
    tags_dir: &Path,
    kind: GenKind,
    output: &Path,
    client: Option<&VlmClient>,
) -> Result<RunResult> {
    cfg.validate()?;
    let tags_dir = super::existing(Some(tags_dir), "tags")?;
    let sidecars = load_sidecars(tags_dir)?;
    let templates = listing_templates();
    log::info!("generating {} records for {} images", kind.name(), sidecars.len());

    let results: Vec<Result<ConversationRecord>> = match kind {
        GenKind::RuleListing => sidecars
            .iter()
            .map(|s| {
                let t = sample_template(&templates, image_seed(cfg.seed, s.image_id))?;
                let text = ListingRecord::from_sidecar(s)?.format_text();
                to_conversation_record(
                    s.image_id,
                    &s.tagged_image,
                    Exchange::Listing { instruction: &t.text },
                    &text,
                )
            })
            .collect(),
        GenKind::Listing(_) | GenKind::Qa => {
            let client = client.ok_or_else(|| Error::Config("no model client configured".into()))?;
            let bundles: Vec<Result<PromptBundle>> =
                sidecars.iter().map(|s| bundle_for(kind, cfg, tags_dir, s)).collect();
            let replies = map_ordered(&bundles, client.config().concurrency, |b| match b {
                Ok(b) => client.submit(b).map(|c| c.text),
                Err(e) => Err(Error::Data(e.to_string())),
            });
            sidecars
                .iter()
                .zip(bundles)
                .zip(replies)
                .map(|((s, bundle), reply)| {
                    // Keep the original error class for failed bundle preparation.
                    bundle?;
                    let reply = reply?;
                    let exchange = match kind {
                        GenKind::Qa => Exchange::Dialogue,
                        _ => Exchange::Listing {
                            instruction: &sample_template(&templates, image_seed(cfg.seed, s.image_id))?.text,
                        },
                    };
                    to_conversation_record(s.image_id, &s.tagged_image, exchange, &reply)
                })
                .collect()
        }
    };

    let mut records = Vec::new();
    let mut failures = Vec::new();
    for (s, r) in sidecars.iter().zip(results) {
        match r {
            Ok(rec) => records.push(rec),
            Err(e) => failures.push(Failure::new(s.image_id, &e)),
        }
    }
    jsonio::write_file(output, &jsonio::to_jsonl(&records))?;
    let mut fname = output.file_name().unwrap_or_default().to_os_string();
    fname.push(".failures.jsonl");
    write_failures(&output.with_file_name(fname), &failures)?;
    Ok(RunResult {
        summary: json!({
            "images": sidecars.len(),
            "records": records.len(),
            "failures": failures.len(),
            "kind": kind.name(),
        }),
        successes: records.len(),
        failures,
    })
}
