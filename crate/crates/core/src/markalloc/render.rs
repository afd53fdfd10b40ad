use image::{ImageEncoder, Rgb, RgbImage};

use super::font::{digits_of, glyph_pixel, GLYPH_HEIGHT, GLYPH_SPACING, GLYPH_WIDTH};
use super::layout::{Collision, TagPlacement};
use super::TagStyle;
use crate::error::{Error, Result};

/// An image with its numbered tags drawn in.
#[derive(Debug, Clone, PartialEq)]
pub struct TaggedImage {
    pub image_id: u64,
    pub pixels: RgbImage,
    pub placements: Vec<TagPlacement>,
    pub collisions: Vec<Collision>,
}

impl TaggedImage {
    /// PNG encoding with fixed encoder settings, so equal rasters give equal bytes.
    pub fn to_png(&self) -> Result<Vec<u8>> {
        encode_png(&self.pixels)
    }
}

pub fn encode_png(pixels: &RgbImage) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    image::codecs::png::PngEncoder::new_with_quality(
        &mut out,
        image::codecs::png::CompressionType::Default,
        image::codecs::png::FilterType::Adaptive,
    )
    .write_image(
        pixels.as_raw(),
        pixels.width(),
        pixels.height(),
        image::ExtendedColorType::Rgb8,
    )?;
    Ok(out)
}

/// Draws each placement as a filled box with the tag number in the embedded
/// digit font. Pixels outside label boxes are left untouched.
pub fn render_tags(
    image_id: u64,
    pixels: &RgbImage,
    placements: &[TagPlacement],
    collisions: &[Collision],
    style: &TagStyle,
) -> Result<TaggedImage> {
    let (iw, ih) = pixels.dimensions();
    let mut sorted = placements.to_vec();
    sorted.sort_by_key(|p| p.tag_id);
    for p in &sorted {
        let b = p.label_box;
        if u64::from(b.x) + u64::from(b.w) > u64::from(iw)
            || u64::from(b.y) + u64::from(b.h) > u64::from(ih)
        {
            return Err(Error::Bounds(format!(
                "tag {} box {:?} outside {iw}x{ih} image",
                p.tag_id, b
            )));
        }
    }

    let mut out = pixels.clone();
    let scale = style.glyph_scale.max(1);
    for p in &sorted {
        let b = p.label_box;
        let fill = Rgb(style.fill_for(p.tag_id));
        for y in b.y..b.y + b.h {
            for x in b.x..b.x + b.w {
                out.put_pixel(x, y, fill);
            }
        }
        let ink = Rgb(style.text_color);
        let origin_x = b.x + style.padding;
        let origin_y = b.y + style.padding;
        for (i, digit) in digits_of(p.tag_id).into_iter().enumerate() {
            let gx = origin_x + i as u32 * (GLYPH_WIDTH + GLYPH_SPACING) * scale;
            for row in 0..GLYPH_HEIGHT {
                for col in 0..GLYPH_WIDTH {
                    if !glyph_pixel(digit, col, row) {
                        continue;
                    }
                    for sy in 0..scale {
                        for sx in 0..scale {
                            let x = gx + col * scale + sx;
                            let y = origin_y + row * scale + sy;
                            // glyphs are clipped to the (possibly clipped) box
                            if x < b.x + b.w && y < b.y + b.h {
                                out.put_pixel(x, y, ink);
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(TaggedImage {
        image_id,
        pixels: out,
        placements: sorted,
        collisions: collisions.to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markalloc::{Point, Rect};

    fn canvas() -> RgbImage {
        RgbImage::from_fn(40, 30, |x, y| Rgb([(x * 3) as u8, (y * 5) as u8, 77]))
    }

    #[test]
    fn no_placements_is_identity() {
        let img = canvas();
        let tagged = render_tags(1, &img, &[], &[], &TagStyle::default()).unwrap();
        assert_eq!(tagged.pixels, img);
    }

    #[test]
    fn out_of_bounds_box_is_rejected() {
        let p = TagPlacement {
            tag_id: 1,
            anchor: Point { x: 39, y: 29 },
            label_box: Rect {
                x: 35,
                y: 25,
                w: 9,
                h: 11,
            },
            annotation_id: 1,
        };
        assert!(matches!(
            render_tags(1, &canvas(), &[p], &[], &TagStyle::default()),
            Err(Error::Bounds(_))
        ));
    }

    #[test]
    fn png_is_stable() {
        let img = canvas();
        assert_eq!(encode_png(&img).unwrap(), encode_png(&img).unwrap());
        let back = image::load_from_memory(&encode_png(&img).unwrap())
            .unwrap()
            .to_rgb8();
        assert_eq!(back, img);
    }
}
