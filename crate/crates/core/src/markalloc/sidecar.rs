use serde::{Deserialize, Serialize};

use super::{Collision, Point, Rect, TaggedImage};
use crate::annotations::{AnnotationSet, ImageRecord};
use crate::error::{Error, Result};

/// Contents of a `.tags.json` file written next to each tagged PNG.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TagSidecar {
    pub image_id: u64,
    pub file_name: String,
    /// File name of the tagged PNG, relative to the sidecar's directory.
    pub tagged_image: String,
    pub width: u32,
    pub height: u32,
    pub level: u8,
    pub placements: Vec<SidecarTag>,
    #[serde(default)]
    pub collisions: Vec<Collision>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SidecarTag {
    pub tag_id: u32,
    pub anchor: Point,
    pub label_box: Rect,
    pub annotation_id: u64,
    pub category: String,
}

impl TagSidecar {
    pub fn build(
        set: &AnnotationSet,
        record: &ImageRecord,
        level: u8,
        tagged: &TaggedImage,
        tagged_image: impl Into<String>,
    ) -> Result<Self> {
        let placements = tagged
            .placements
            .iter()
            .map(|p| {
                let ann = set.annotation(p.annotation_id).ok_or_else(|| Error::Referential {
                    annotation_id: p.annotation_id,
                    message: "placement refers to a missing annotation".into(),
                })?;
                let cat = set.category(ann.category_id).ok_or_else(|| Error::Referential {
                    annotation_id: ann.id,
                    message: format!("unknown category_id {}", ann.category_id),
                })?;
                Ok(SidecarTag {
                    tag_id: p.tag_id,
                    anchor: p.anchor,
                    label_box: p.label_box,
                    annotation_id: p.annotation_id,
                    category: cat.name.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(TagSidecar {
            image_id: record.id,
            file_name: record.file_name.clone(),
            tagged_image: tagged_image.into(),
            width: record.width,
            height: record.height,
            level,
            placements,
            collisions: tagged.collisions.clone(),
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("sidecar serializes");
        s.push('\n');
        s
    }

    /// Tag ids must be exactly 1..N in order, boxes inside the image.
    pub fn validate(&self) -> Result<()> {
        for (i, t) in self.placements.iter().enumerate() {
            if t.tag_id as usize != i + 1 {
                return Err(Error::Data(format!(
                    "sidecar for image {}: tag ids are not 1..N (position {} has {})",
                    self.image_id,
                    i + 1,
                    t.tag_id
                )));
            }
            let b = t.label_box;
            if u64::from(b.x) + u64::from(b.w) > u64::from(self.width)
                || u64::from(b.y) + u64::from(b.h) > u64::from(self.height)
            {
                return Err(Error::Bounds(format!(
                    "sidecar for image {}: tag {} box outside the image",
                    self.image_id, t.tag_id
                )));
            }
        }
        Ok(())
    }
}

pub fn parse_sidecar(bytes: &[u8]) -> Result<TagSidecar> {
    let sidecar: TagSidecar =
        serde_json::from_slice(bytes).map_err(|e| Error::json("tag sidecar", bytes, &e))?;
    sidecar.validate()?;
    Ok(sidecar)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shape() {
        let s = TagSidecar {
            image_id: 3,
            file_name: "a.jpg".into(),
            tagged_image: "a.png".into(),
            width: 20,
            height: 20,
            level: 2,
            placements: vec![SidecarTag {
                tag_id: 1,
                anchor: Point { x: 4, y: 5 },
                label_box: Rect { x: 1, y: 2, w: 9, h: 11 },
                annotation_id: 8,
                category: "dog".into(),
            }],
            collisions: vec![],
        };
        let v: serde_json::Value = serde_json::from_str(&s.to_json()).unwrap();
        assert_eq!(v["placements"][0]["anchor"], serde_json::json!([4, 5]));
        assert_eq!(v["placements"][0]["label_box"], serde_json::json!([1, 2, 9, 11]));
        assert_eq!(parse_sidecar(s.to_json().as_bytes()).unwrap(), s);
    }

    #[test]
    fn gapped_ids_rejected() {
        let json = br#"{"image_id":1,"file_name":"","tagged_image":"","width":9,"height":9,
            "level":2,"placements":[{"tag_id":2,"anchor":[1,1],"label_box":[0,0,1,1],
            "annotation_id":1,"category":"x"}]}"#;
        assert!(parse_sidecar(json).is_err());
    }
}
