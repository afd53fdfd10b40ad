//! COCO-style instance annotations and the masks they describe.

mod mask;
mod polygon;
mod rle;

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use mask::{mask_area, BinaryMask, MAX_MASK_PIXELS};
pub use polygon::rasterize_polygon;
pub use rle::{counts_from_string, counts_to_string, decode_rle, encode_rle};

/// Slack allowed when checking that a bbox lies inside its image. COCO
/// boxes are float-valued and routinely overshoot the border by rounding.
const BBOX_TOLERANCE: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageRecord {
    pub id: u64,
    pub width: u32,
    pub height: u32,
    pub file_name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryRecord {
    pub id: u64,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Segmentation {
    /// One or more flat `x, y` sequences; the object is their union.
    Polygons(Vec<Vec<f64>>),
    /// Run lengths with `size = [height, width]`.
    Rle { size: [u32; 2], counts: Vec<u32> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentationAnnotation {
    pub id: u64,
    pub image_id: u64,
    pub category_id: u64,
    pub segmentation: Segmentation,
    /// `(x, y, w, h)` in pixels.
    pub bbox: [f64; 4],
    pub area: f64,
    pub iscrowd: bool,
}

impl SegmentationAnnotation {
    /// Materializes the mask on the parent image's grid.
    pub fn to_mask(&self, image: &ImageRecord) -> Result<BinaryMask> {
        match &self.segmentation {
            Segmentation::Rle { size, counts } => {
                if size[0] != image.height || size[1] != image.width {
                    return Err(Error::Referential {
                        annotation_id: self.id,
                        message: format!(
                            "RLE size [{}, {}] does not match image {} ({}x{})",
                            size[0], size[1], image.id, image.height, image.width
                        ),
                    });
                }
                decode_rle((size[0], size[1]), counts)
            }
            Segmentation::Polygons(polys) => {
                let mut mask = BinaryMask::new(image.width, image.height)?;
                for poly in polys {
                    mask.union_with(&rasterize_polygon(poly, image.width, image.height)?)?;
                }
                Ok(mask)
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AnnotationSet {
    pub images: Vec<ImageRecord>,
    pub categories: Vec<CategoryRecord>,
    pub annotations: Vec<SegmentationAnnotation>,
}

impl AnnotationSet {
    pub fn image(&self, id: u64) -> Option<&ImageRecord> {
        self.images.iter().find(|i| i.id == id)
    }

    pub fn category(&self, id: u64) -> Option<&CategoryRecord> {
        self.categories.iter().find(|c| c.id == id)
    }

    pub fn annotation(&self, id: u64) -> Option<&SegmentationAnnotation> {
        self.annotations.iter().find(|a| a.id == id)
    }

    /// Annotations of one image, in file order.
    pub fn annotations_for(&self, image_id: u64) -> impl Iterator<Item = &SegmentationAnnotation> {
        self.annotations.iter().filter(move |a| a.image_id == image_id)
    }

    pub fn category_names(&self) -> BTreeMap<u64, &str> {
        self.categories.iter().map(|c| (c.id, c.name.as_str())).collect()
    }
}

// Wire shapes. Unknown fields are dropped by serde's default behaviour.

#[derive(Deserialize)]
struct RawFile {
    images: Vec<RawImage>,
    annotations: Vec<RawAnnotation>,
    categories: Vec<RawCategory>,
}

#[derive(Deserialize)]
struct RawImage {
    id: u64,
    width: u32,
    height: u32,
    #[serde(default)]
    file_name: String,
}

#[derive(Deserialize)]
struct RawCategory {
    id: u64,
    name: String,
}

#[derive(Deserialize)]
struct RawAnnotation {
    id: u64,
    image_id: u64,
    category_id: u64,
    segmentation: RawSegmentation,
    bbox: [f64; 4],
    area: f64,
    #[serde(default)]
    iscrowd: u8,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawSegmentation {
    Polygons(Vec<Vec<f64>>),
    Rle { size: [u32; 2], counts: RawCounts },
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawCounts {
    Runs(Vec<u32>),
    Compressed(String),
}

/// Parses and validates a COCO-style annotation file.
pub fn parse_annotation_file(bytes: &[u8]) -> Result<AnnotationSet> {
    let raw: RawFile =
        serde_json::from_slice(bytes).map_err(|e| Error::json("annotation file", bytes, &e))?;

    let mut image_ids = HashSet::new();
    let mut images = Vec::with_capacity(raw.images.len());
    for img in raw.images {
        if img.width == 0 || img.height == 0 {
            return Err(Error::InvalidAnnotation(format!(
                "image {} has zero width or height",
                img.id
            )));
        }
        if !image_ids.insert(img.id) {
            return Err(Error::InvalidAnnotation(format!("duplicate image id {}", img.id)));
        }
        images.push(ImageRecord {
            id: img.id,
            width: img.width,
            height: img.height,
            file_name: img.file_name,
        });
    }

    let mut category_ids = HashSet::new();
    let mut categories = Vec::with_capacity(raw.categories.len());
    for cat in raw.categories {
        let name = cat.name.trim().to_lowercase();
        if name.is_empty() {
            return Err(Error::InvalidAnnotation(format!(
                "category {} has an empty name",
                cat.id
            )));
        }
        if !category_ids.insert(cat.id) {
            return Err(Error::InvalidAnnotation(format!(
                "duplicate category id {}",
                cat.id
            )));
        }
        categories.push(CategoryRecord { id: cat.id, name });
    }

    let dims: HashMap<u64, (u32, u32)> =
        images.iter().map(|i| (i.id, (i.width, i.height))).collect();
    let mut annotation_ids = HashSet::new();
    let mut annotations = Vec::with_capacity(raw.annotations.len());
    for ann in raw.annotations {
        let referential = |message: String| Error::Referential {
            annotation_id: ann.id,
            message,
        };
        if !annotation_ids.insert(ann.id) {
            return Err(referential("duplicate annotation id".into()));
        }
        let Some(&(width, height)) = dims.get(&ann.image_id) else {
            return Err(referential(format!("unknown image_id {}", ann.image_id)));
        };
        if !category_ids.contains(&ann.category_id) {
            return Err(referential(format!(
                "unknown category_id {}",
                ann.category_id
            )));
        }
        if ann.area.is_nan() || ann.area <= 0.0 {
            return Err(referential(format!("area {} is not positive", ann.area)));
        }
        let [bx, by, bw, bh] = ann.bbox;
        if bw < 0.0
            || bh < 0.0
            || bx < -BBOX_TOLERANCE
            || by < -BBOX_TOLERANCE
            || bx + bw > f64::from(width) + BBOX_TOLERANCE
            || by + bh > f64::from(height) + BBOX_TOLERANCE
        {
            return Err(referential(format!(
                "bbox {:?} exceeds image {} bounds {width}x{height}",
                ann.bbox, ann.image_id
            )));
        }
        let segmentation = match ann.segmentation {
            RawSegmentation::Polygons(polys) => {
                if polys.is_empty() {
                    return Err(referential("empty polygon list".into()));
                }
                if let Some(bad) = polys.iter().find(|p| p.len() % 2 != 0 || p.len() < 6) {
                    return Err(referential(format!(
                        "polygon with {} coordinates (need an even count >= 6)",
                        bad.len()
                    )));
                }
                Segmentation::Polygons(polys)
            }
            RawSegmentation::Rle { size, counts } => {
                let counts = match counts {
                    RawCounts::Runs(runs) => runs,
                    RawCounts::Compressed(s) => counts_from_string(&s)
                        .map_err(|e| referential(e.to_string()))?,
                };
                if size != [height, width] {
                    return Err(referential(format!(
                        "RLE size {size:?} does not match image {} [{height}, {width}]",
                        ann.image_id
                    )));
                }
                let total: u64 = counts.iter().map(|&c| u64::from(c)).sum();
                if total != u64::from(height) * u64::from(width) {
                    return Err(referential(format!(
                        "RLE runs cover {total} pixels, image has {}",
                        u64::from(height) * u64::from(width)
                    )));
                }
                Segmentation::Rle { size, counts }
            }
        };
        annotations.push(SegmentationAnnotation {
            id: ann.id,
            image_id: ann.image_id,
            category_id: ann.category_id,
            segmentation,
            bbox: ann.bbox,
            area: ann.area,
            iscrowd: ann.iscrowd != 0,
        });
    }

    Ok(AnnotationSet {
        images,
        categories,
        annotations,
    })
}
