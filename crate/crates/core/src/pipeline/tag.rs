use std::path::Path;

use serde_json::json;

use super::{existing, write_failures, Failure, PipelineConfig, RunResult};
use crate::annotations::{parse_annotation_file, AnnotationSet, ImageRecord};
use crate::error::{Error, Result};
use crate::jsonio;
use crate::markalloc::{tag_image, GranularityLevel, TagSidecar};
use crate::pool::map_ordered;
use crate::textgen::record_id;

struct Tagged {
    tags: usize,
    collisions: usize,
}

fn load_rgb(path: &Path) -> Result<image::RgbImage> {
    match image::open(path) {
        Ok(img) => Ok(img.to_rgb8()),
        Err(image::ImageError::IoError(e)) => Err(Error::io(path, e)),
        Err(e) => Err(e.into()),
    }
}

fn tag_one(
    set: &AnnotationSet,
    record: &ImageRecord,
    level: GranularityLevel,
    cfg: &PipelineConfig,
    images: &Path,
    out: &Path,
) -> Result<Option<Tagged>> {
    let pixels = load_rgb(&images.join(&record.file_name))?;
    let tagged = tag_image(set, record.id, level, &cfg.tag_style, &pixels)?;
    if tagged.placements.is_empty() {
        log::info!("image {}: no mask passes level {}", record.id, level.level());
        return Ok(None);
    }
    let stem = record_id(record.id);
    let png_name = format!("{stem}.png");
    let sidecar = TagSidecar::build(set, record, level.level(), &tagged, &png_name)?;
    sidecar.validate()?;
    jsonio::write_file(&out.join(&png_name), &tagged.to_png()?)?;
    jsonio::write_file(&out.join(format!("{stem}.tags.json")), sidecar.to_json().as_bytes())?;
    Ok(Some(Tagged {
        tags: tagged.placements.len(),
        collisions: tagged.collisions.len(),
    }))
}

/// Tags every image of the annotation file, writing `<id>.png` and
/// `<id>.tags.json` per image that keeps at least one mask.
pub fn run_tag(cfg: &PipelineConfig) -> Result<RunResult> {
    cfg.validate()?;
    let annotations = existing(cfg.annotations.as_deref(), "annotations")?;
    let images = existing(cfg.images.as_deref(), "images")?;
    let out = cfg
        .output_dir
        .as_deref()
        .ok_or_else(|| Error::Config("no output directory given".into()))?;
    let level = cfg.granularity_level()?;
    let set = parse_annotation_file(&jsonio::read_file(annotations)?)?;
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;

    let mut records: Vec<&ImageRecord> = set.images.iter().collect();
    records.sort_by_key(|r| r.id);
    log::info!("tagging {} images at level {}", records.len(), level.level());
    let results = map_ordered(&records, cfg.jobs, |r| tag_one(&set, r, level, cfg, images, out));

    let (mut done, mut tags, mut collisions, mut untagged) = (0, 0, 0, 0);
    let mut failures = Vec::new();
    for (r, res) in records.iter().zip(results) {
        match res {
            Ok(Some(t)) => {
                done += 1;
                tags += t.tags;
                collisions += t.collisions;
            }
            Ok(None) => untagged += 1,
            Err(e) => failures.push(Failure::new(r.id, &e)),
        }
    }
    write_failures(&out.join("failures.jsonl"), &failures)?;
    Ok(RunResult {
        summary: json!({
            "images": done,
            "tags": tags,
            "collisions": collisions,
            "untagged": untagged,
            "failures": failures.len(),
        }),
        successes: done + untagged,
        failures,
    })
}
