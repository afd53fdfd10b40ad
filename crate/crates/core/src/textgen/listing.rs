use serde::{Deserialize, Serialize};

use crate::annotations::AnnotationSet;
use crate::error::{Error, Result};
use crate::listparse::ListingItem;
use crate::markalloc::{TagPlacement, TagSidecar};

/// Ordered descriptions of the tagged objects of one image.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawListingRecord")]
pub struct ListingRecord {
    pub image_id: u64,
    pub items: Vec<ListingItem>,
}

#[derive(Deserialize)]
struct RawListingRecord {
    image_id: u64,
    items: Vec<ListingItem>,
}

impl TryFrom<RawListingRecord> for ListingRecord {
    type Error = Error;

    fn try_from(raw: RawListingRecord) -> Result<Self> {
        ListingRecord::new(raw.image_id, raw.items)
    }
}

impl ListingRecord {
    /// Tag ids must start at 1 and strictly increase; descriptions must be
    /// non-blank.
    pub fn new(image_id: u64, items: Vec<ListingItem>) -> Result<Self> {
        let mut prev = 0;
        for item in &items {
            if item.tag_id <= prev || (prev == 0 && item.tag_id != 1) {
                return Err(Error::Listing(format!(
                    "image {image_id}: tag id {} after {prev}",
                    item.tag_id
                )));
            }
            if item.description.trim().is_empty() {
                return Err(Error::Listing(format!(
                    "image {image_id}: tag {} has an empty description",
                    item.tag_id
                )));
            }
            prev = item.tag_id;
        }
        Ok(ListingRecord { image_id, items })
    }

    /// `"1. person, 2. cat, 3. dog."`
    pub fn format_text(&self) -> String {
        let mut out = self
            .items
            .iter()
            .map(|i| format!("{}. {}", i.tag_id, i.description))
            .collect::<Vec<_>>()
            .join(", ");
        if !out.is_empty() {
            out.push('.');
        }
        out
    }

    /// Gold listing from a tagging sidecar's category names.
    pub fn from_sidecar(sidecar: &TagSidecar) -> Result<Self> {
        let mut tags = sidecar.placements.clone();
        tags.sort_by_key(|t| t.tag_id);
        ListingRecord::new(
            sidecar.image_id,
            tags.into_iter()
                .map(|t| ListingItem::new(t.tag_id, t.category))
                .collect(),
        )
    }
}

/// Ground-truth listing: each tag paired with its annotation's category name,
/// in tag order.
pub fn rule_based_listing(
    set: &AnnotationSet,
    image_id: u64,
    placements: &[TagPlacement],
) -> Result<ListingRecord> {
    let mut sorted: Vec<&TagPlacement> = placements.iter().collect();
    sorted.sort_by_key(|p| p.tag_id);
    let items = sorted
        .into_iter()
        .map(|p| {
            let ann = set.annotation(p.annotation_id).ok_or_else(|| Error::Referential {
                annotation_id: p.annotation_id,
                message: "placement refers to a missing annotation".into(),
            })?;
            let cat = set.category(ann.category_id).ok_or_else(|| Error::Referential {
                annotation_id: ann.id,
                message: format!("unknown category_id {}", ann.category_id),
            })?;
            Ok(ListingItem::new(p.tag_id, cat.name.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    ListingRecord::new(image_id, items)
}
