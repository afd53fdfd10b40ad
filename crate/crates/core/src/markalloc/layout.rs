use serde::{Deserialize, Serialize};

use super::font::{text_width, GLYPH_HEIGHT};
use super::{Point, Rect, TagStyle};

/// Rings of the displacement spiral tried before giving up on a label.
pub const MAX_SPIRAL_RINGS: u32 = 8;

/// Unit directions per spiral ring, in trial order.
const SPIRAL_DIRECTIONS: [(i64, i64); 8] = [
    (0, -1),
    (1, 0),
    (0, 1),
    (-1, 0),
    (1, -1),
    (1, 1),
    (-1, 1),
    (-1, -1),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Anchor {
    pub annotation_id: u64,
    pub point: Point,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TagPlacement {
    pub tag_id: u32,
    pub anchor: Point,
    pub label_box: Rect,
    pub annotation_id: u64,
}

/// A label that could not be moved clear of an earlier one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Collision {
    pub tag_id: u32,
    pub overlaps_tag_id: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    pub placements: Vec<TagPlacement>,
    pub collisions: Vec<Collision>,
}

/// Numbers anchors 1..N in raster order (ascending y, then x). Equal
/// anchors keep their input order. Label boxes are left empty at the anchor
/// until [`resolve_overlaps`] sizes them.
pub fn assign_tags(anchors: &[Anchor]) -> Vec<TagPlacement> {
    let mut sorted = anchors.to_vec();
    sorted.sort_by_key(|a| (a.point.y, a.point.x));
    sorted
        .into_iter()
        .enumerate()
        .map(|(i, a)| TagPlacement {
            tag_id: i as u32 + 1,
            anchor: a.point,
            label_box: Rect {
                x: a.point.x,
                y: a.point.y,
                w: 0,
                h: 0,
            },
            annotation_id: a.annotation_id,
        })
        .collect()
}

/// Label box dimensions for a tag number under `style`.
pub fn label_size(tag_id: u32, style: &TagStyle) -> (u32, u32) {
    let scale = style.glyph_scale.max(1);
    (
        text_width(tag_id) * scale + 2 * style.padding,
        GLYPH_HEIGHT * scale + 2 * style.padding,
    )
}

/// Box of size `(w, h)` centred on `anchor`, shifted (or clipped, if larger
/// than the image) to stay within `dims`.
fn box_at_anchor(anchor: Point, (w, h): (u32, u32), (iw, ih): (u32, u32)) -> Rect {
    let w = w.min(iw);
    let h = h.min(ih);
    let x = anchor.x.saturating_sub(w / 2).min(iw - w);
    let y = anchor.y.saturating_sub(h / 2).min(ih - h);
    Rect { x, y, w, h }
}

fn offset_in_bounds(base: Rect, dx: i64, dy: i64, (iw, ih): (u32, u32)) -> Option<Rect> {
    let x = i64::from(base.x) + dx;
    let y = i64::from(base.y) + dy;
    if x < 0 || y < 0 || x + i64::from(base.w) > i64::from(iw) || y + i64::from(base.h) > i64::from(ih)
    {
        return None;
    }
    Some(Rect {
        x: x as u32,
        y: y as u32,
        ..base
    })
}

/// Greedy label placement in tag order.
///
/// Each box starts centred on its anchor. If it overlaps an earlier box it
/// walks a fixed spiral of offsets (step = box height, up to
/// [`MAX_SPIRAL_RINGS`] rings) and takes the first in-bounds candidate that is
/// clear of every earlier box. A box with no clear candidate stays at the
/// anchor and each overlap is reported as a [`Collision`].
pub fn resolve_overlaps(
    placements: &[TagPlacement],
    style: &TagStyle,
    dims: (u32, u32),
) -> Layout {
    let mut placed: Vec<TagPlacement> = Vec::with_capacity(placements.len());
    let mut collisions = Vec::new();
    if dims.0 == 0 || dims.1 == 0 {
        return Layout {
            placements: placements.to_vec(),
            collisions,
        };
    }
    for p in placements {
        let base = box_at_anchor(p.anchor, label_size(p.tag_id, style), dims);
        let clear = |r: &Rect| placed.iter().all(|q| !q.label_box.intersects(r));
        let chosen = if clear(&base) {
            Some(base)
        } else {
            let step = i64::from(base.h.max(1));
            (1..=i64::from(MAX_SPIRAL_RINGS))
                .flat_map(|ring| {
                    SPIRAL_DIRECTIONS
                        .iter()
                        .map(move |(dx, dy)| (dx * ring * step, dy * ring * step))
                })
                .filter_map(|(dx, dy)| offset_in_bounds(base, dx, dy, dims))
                .find(|r| clear(r))
        };
        let label_box = match chosen {
            Some(r) => r,
            None => {
                collisions.extend(
                    placed
                        .iter()
                        .filter(|q| q.label_box.intersects(&base))
                        .map(|q| Collision {
                            tag_id: p.tag_id,
                            overlaps_tag_id: q.tag_id,
                        }),
                );
                base
            }
        };
        placed.push(TagPlacement {
            label_box,
            ..p.clone()
        });
    }
    Layout {
        placements: placed,
        collisions,
    }
}
