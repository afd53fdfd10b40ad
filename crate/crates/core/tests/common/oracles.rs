//! Brute-force reference implementations, written independently of the
//! library code they check.

use somkit::markalloc::{glyph_pixel, TagPlacement, TagStyle, GLYPH_HEIGHT, GLYPH_SPACING, GLYPH_WIDTH};

/// Argmax over foreground pixels of the Chebyshev distance to the nearest
/// background pixel, with the outside of the grid as background. Raster-order
/// first wins ties.
pub fn chebyshev_argmax(w: usize, h: usize, bits: &[bool]) -> Option<(usize, usize)> {
    let mut best: Option<((usize, usize), usize)> = None;
    for y in 0..h {
        for x in 0..w {
            if !bits[y * w + x] {
                continue;
            }
            let mut d = (x + 1).min(y + 1).min(w - x).min(h - y);
            for qy in 0..h {
                for qx in 0..w {
                    if !bits[qy * w + qx] {
                        d = d.min(x.abs_diff(qx).max(y.abs_diff(qy)));
                    }
                }
            }
            if best.is_none_or(|(_, bd)| d > bd) {
                best = Some(((x, y), d));
            }
        }
    }
    best.map(|(p, _)| p)
}

/// W. R. Franklin's PNPOLY crossing test.
pub fn pnpoly(xs: &[f64], ys: &[f64], x: f64, y: f64) -> bool {
    let n = xs.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        if (ys[i] > y) != (ys[j] > y) && x < (xs[j] - xs[i]) * (y - ys[i]) / (ys[j] - ys[i]) + xs[i] {
            inside = !inside;
        }
        j = i;
    }
    inside
}

/// Column-major run unrolling into a row-major grid.
pub fn unroll_rle(w: usize, h: usize, counts: &[u32]) -> Vec<bool> {
    let mut out = vec![false; w * h];
    let mut k = 0usize;
    for (i, &c) in counts.iter().enumerate() {
        for _ in 0..c {
            let (x, y) = (k / h, k % h);
            out[y * w + x] = i % 2 == 1;
            k += 1;
        }
    }
    assert_eq!(k, w * h);
    out
}

/// Expected colour of pixel (x, y) after drawing `placements` over `base`.
pub fn rendered_pixel(base: [u8; 3], placements: &[TagPlacement], style: &TagStyle, x: u32, y: u32) -> [u8; 3] {
    let mut sorted = placements.to_vec();
    sorted.sort_by_key(|p| p.tag_id);
    let Some(p) = sorted.iter().rev().find(|p| p.label_box.contains(x, y)) else {
        return base;
    };
    let b = p.label_box;
    let s = style.glyph_scale;
    let digits: Vec<u8> = p.tag_id.to_string().bytes().map(|c| c - b'0').collect();
    let (ox, oy) = (b.x + style.padding, b.y + style.padding);
    if x >= ox && y >= oy {
        let (lx, ly) = (x - ox, y - oy);
        let advance = (GLYPH_WIDTH + GLYPH_SPACING) * s;
        let (gi, col, row) = ((lx / advance) as usize, (lx % advance) / s, ly / s);
        if gi < digits.len() && col < GLYPH_WIDTH && row < GLYPH_HEIGHT && glyph_pixel(digits[gi], col, row) {
            return style.text_color;
        }
    }
    style.fill_for(p.tag_id)
}

/// List-wise accuracy by direct counting: gold item i is correct when the
/// first predicted item with tag i has the same lowercased, trimmed text.
pub fn exact_listwise(pred: &[(u32, String)], gold: &[(u32, String)]) -> (u64, u64) {
    let norm = |s: &str| s.trim().to_lowercase();
    let mut m = 0;
    for (id, g) in gold {
        if let Some((_, p)) = pred.iter().find(|(pid, _)| pid == id) {
            if norm(p) == norm(g) {
                m += 1;
            }
        }
    }
    (m, gold.len() as u64)
}
