use super::mask::BinaryMask;
use crate::error::{Error, Result};

/// Fills a polygon given as a flat `x0, y0, x1, y1, ...` list.
///
/// Even-odd rule, sampled at pixel centers: pixel `(i, j)` is set iff
/// `(i + 0.5, j + 0.5)` is inside. Each row is filled from its sorted edge
/// crossings, so the cost is proportional to edges times rows plus pixels.
pub fn rasterize_polygon(points: &[f64], width: u32, height: u32) -> Result<BinaryMask> {
    if !points.len().is_multiple_of(2) {
        return Err(Error::Shape(format!(
            "polygon has an odd number of coordinates ({})",
            points.len()
        )));
    }
    if points.len() < 6 {
        return Err(Error::Shape(format!(
            "polygon needs at least 3 vertices, got {}",
            points.len() / 2
        )));
    }
    if points.iter().any(|v| !v.is_finite()) {
        return Err(Error::Shape("polygon coordinate is not finite".into()));
    }

    let mut mask = BinaryMask::new(width, height)?;
    let vertices: Vec<(f64, f64)> = points.chunks_exact(2).map(|c| (c[0], c[1])).collect();
    let n = vertices.len();

    let (min_y, max_y) = vertices
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v.1), hi.max(v.1))
        });
    let first_row = (min_y - 0.5).ceil().max(0.0);
    let last_row = (max_y - 0.5).floor().min(f64::from(height) - 1.0);
    if first_row > last_row {
        return Ok(mask);
    }

    let mut crossings: Vec<f64> = Vec::with_capacity(n);
    for row in first_row as u32..=last_row as u32 {
        let yc = f64::from(row) + 0.5;
        crossings.clear();
        let mut j = n - 1;
        for i in 0..n {
            let (xi, yi) = vertices[i];
            let (xj, yj) = vertices[j];
            if (yi > yc) != (yj > yc) {
                crossings.push((xj - xi) * (yc - yi) / (yj - yi) + xi);
            }
            j = i;
        }
        if crossings.is_empty() {
            continue;
        }
        crossings.sort_by(|a, b| a.total_cmp(b));
        // Centers strictly left of an odd number of crossings are inside.
        for pair in crossings.chunks(2) {
            let [left, right] = pair else { break };
            // xc >= left and xc < right
            let start = (left - 0.5).ceil().max(0.0);
            let end = (right - 0.5).ceil().min(f64::from(width));
            if start >= end {
                continue;
            }
            for col in start as u32..end as u32 {
                mask.set(col, row, true);
            }
        }
    }
    Ok(mask)
}
