//! Mask selection, tag anchoring, numbering, label layout and rendering.

mod anchor;
mod font;
mod layout;
mod render;
mod sidecar;

use image::RgbImage;
use serde::{Deserialize, Serialize};

use crate::annotations::{AnnotationSet, BinaryMask, SegmentationAnnotation};
use crate::error::{Error, Result};

pub use anchor::{anchor_point, chebyshev_distance};
pub use font::{glyph_pixel, GLYPH_HEIGHT, GLYPH_SPACING, GLYPH_WIDTH};
pub use layout::{
    assign_tags, label_size, resolve_overlaps, Anchor, Collision, Layout, TagPlacement,
    MAX_SPIRAL_RINGS,
};
pub use render::{encode_png, render_tags, TaggedImage};
pub use sidecar::{parse_sidecar, SidecarTag, TagSidecar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "[u32; 2]", into = "[u32; 2]")]
pub struct Point {
    pub x: u32,
    pub y: u32,
}

impl From<[u32; 2]> for Point {
    fn from([x, y]: [u32; 2]) -> Self {
        Point { x, y }
    }
}

impl From<Point> for [u32; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

/// Axis-aligned pixel rectangle covering `[x, x+w) x [y, y+h)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(from = "[u32; 4]", into = "[u32; 4]")]
pub struct Rect {
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
}

impl From<[u32; 4]> for Rect {
    fn from([x, y, w, h]: [u32; 4]) -> Self {
        Rect { x, y, w, h }
    }
}

impl From<Rect> for [u32; 4] {
    fn from(r: Rect) -> Self {
        [r.x, r.y, r.w, r.h]
    }
}

impl Rect {
    pub fn intersects(&self, other: &Rect) -> bool {
        if self.w == 0 || self.h == 0 || other.w == 0 || other.h == 0 {
            return false;
        }
        let (ax1, ay1) = (u64::from(self.x) + u64::from(self.w), u64::from(self.y) + u64::from(self.h));
        let (bx1, by1) = (u64::from(other.x) + u64::from(other.w), u64::from(other.y) + u64::from(other.h));
        u64::from(self.x) < bx1
            && u64::from(other.x) < ax1
            && u64::from(self.y) < by1
            && u64::from(other.y) < ay1
    }

    pub fn contains(&self, x: u32, y: u32) -> bool {
        x >= self.x
            && y >= self.y
            && u64::from(x) < u64::from(self.x) + u64::from(self.w)
            && u64::from(y) < u64::from(self.y) + u64::from(self.h)
    }
}

/// Label box colours, indexed by `tag_id % 8`.
pub const PALETTE: [[u8; 3]; 8] = [
    [200, 30, 45],
    [30, 110, 200],
    [35, 135, 60],
    [145, 40, 170],
    [205, 95, 20],
    [20, 125, 125],
    [115, 75, 35],
    [70, 70, 70],
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoxFill {
    Palette,
    Solid([u8; 3]),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct TagStyle {
    pub box_fill: BoxFill,
    pub text_color: [u8; 3],
    pub glyph_scale: u32,
    pub padding: u32,
}

impl Default for TagStyle {
    fn default() -> Self {
        TagStyle {
            box_fill: BoxFill::Palette,
            text_color: [255, 255, 255],
            glyph_scale: 2,
            padding: 2,
        }
    }
}

impl TagStyle {
    pub fn validate(&self) -> Result<()> {
        if self.glyph_scale < 1 {
            return Err(Error::Config("glyph_scale must be >= 1".into()));
        }
        Ok(())
    }

    pub fn fill_for(&self, tag_id: u32) -> [u8; 3] {
        match self.box_fill {
            BoxFill::Palette => PALETTE[(tag_id % 8) as usize],
            BoxFill::Solid(c) => c,
        }
    }
}

pub const DEFAULT_AREA_FRACTIONS: [f64; 3] = [0.02, 0.005, 0.001];

/// One granularity level and its minimum mask area as a fraction of the image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GranularityLevel {
    level: u8,
    min_area_fraction: f64,
}

impl GranularityLevel {
    pub fn new(level: u8, min_area_fraction: f64) -> Result<Self> {
        if !(1..=3).contains(&level) {
            return Err(Error::Config(format!("granularity level {level} not in 1..=3")));
        }
        if !(min_area_fraction > 0.0 && min_area_fraction <= 1.0) {
            return Err(Error::Config(format!(
                "area fraction {min_area_fraction} not in (0, 1]"
            )));
        }
        Ok(GranularityLevel {
            level,
            min_area_fraction,
        })
    }

    pub fn level(&self) -> u8 {
        self.level
    }

    pub fn min_area_fraction(&self) -> f64 {
        self.min_area_fraction
    }
}

/// Area fractions for levels 1 (coarse) to 3 (fine).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Granularity(pub [f64; 3]);

impl Default for Granularity {
    fn default() -> Self {
        Granularity(DEFAULT_AREA_FRACTIONS)
    }
}

impl Granularity {
    pub fn level(&self, level: u8) -> Result<GranularityLevel> {
        let [l1, l2, l3] = self.0;
        if !(l1 > l2 && l2 > l3) {
            return Err(Error::Config(format!(
                "area fractions must decrease from level 1 to 3, got {:?}",
                self.0
            )));
        }
        let idx = usize::from(level.clamp(1, 3) - 1);
        GranularityLevel::new(level, self.0[idx])
    }
}

#[derive(Debug, Clone)]
pub struct SelectedMask<'a> {
    pub annotation: &'a SegmentationAnnotation,
    pub mask: BinaryMask,
    pub anchor: Point,
}

/// Masks of `image_id` that survive the level's area threshold, in tag order.
///
/// Crowd regions are skipped. At level 1 a mask fully covered by another
/// surviving mask is dropped as well; of two identical masks the one with
/// the lower annotation id is kept.
pub fn select_masks<'a>(
    set: &'a AnnotationSet,
    image_id: u64,
    level: GranularityLevel,
) -> Result<Vec<SelectedMask<'a>>> {
    let image = set
        .image(image_id)
        .ok_or_else(|| Error::Data(format!("unknown image id {image_id}")))?;
    let threshold = level.min_area_fraction * f64::from(image.width) * f64::from(image.height);

    let mut kept: Vec<(&SegmentationAnnotation, BinaryMask)> = Vec::new();
    for ann in set.annotations_for(image_id).filter(|a| !a.iscrowd) {
        let mask = ann.to_mask(image)?;
        let area = mask.area();
        if area > 0 && area as f64 >= threshold {
            kept.push((ann, mask));
        }
    }

    if level.level == 1 {
        let contained: Vec<bool> = kept
            .iter()
            .enumerate()
            .map(|(i, (ai, mi))| {
                kept.iter().enumerate().any(|(j, (aj, mj))| {
                    i != j && mi.is_subset_of(mj) && (!mj.is_subset_of(mi) || aj.id < ai.id)
                })
            })
            .collect();
        kept = kept
            .into_iter()
            .zip(contained)
            .filter_map(|(k, c)| (!c).then_some(k))
            .collect();
    }

    let mut selected = kept
        .into_iter()
        .map(|(annotation, mask)| {
            let anchor = anchor_point(&mask)?;
            Ok(SelectedMask {
                annotation,
                mask,
                anchor,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    selected.sort_by_key(|s| (s.anchor.y, s.anchor.x));
    Ok(selected)
}

/// Full tagging of one image: select, anchor, number, lay out, render.
pub fn tag_image(
    set: &AnnotationSet,
    image_id: u64,
    level: GranularityLevel,
    style: &TagStyle,
    pixels: &RgbImage,
) -> Result<TaggedImage> {
    style.validate()?;
    let record = set
        .image(image_id)
        .ok_or_else(|| Error::Data(format!("unknown image id {image_id}")))?;
    if pixels.dimensions() != (record.width, record.height) {
        return Err(Error::Dimension(format!(
            "image {image_id} is {}x{} on disk but {}x{} in annotations",
            pixels.width(),
            pixels.height(),
            record.width,
            record.height
        )));
    }
    let selected = select_masks(set, image_id, level)?;
    let anchors: Vec<Anchor> = selected
        .iter()
        .map(|s| Anchor {
            annotation_id: s.annotation.id,
            point: s.anchor,
        })
        .collect();
    let numbered = assign_tags(&anchors);
    let layout = resolve_overlaps(&numbered, style, pixels.dimensions());
    render_tags(image_id, pixels, &layout.placements, &layout.collisions, style)
}
