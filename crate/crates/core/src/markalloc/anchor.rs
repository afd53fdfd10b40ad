use crate::annotations::BinaryMask;
use crate::error::{Error, Result};

use super::Point;

/// Chessboard distance from every pixel to the nearest background pixel,
/// with everything outside the grid counted as background. Background
/// pixels get 0; an isolated foreground pixel gets 1.
///
/// Two raster passes over the 8-neighbourhood with unit weights, which is
/// exact for the Chebyshev metric.
pub fn chebyshev_distance(mask: &BinaryMask) -> Vec<u32> {
    let (w, h) = (mask.width() as usize, mask.height() as usize);
    let mut dist: Vec<u32> = mask
        .bits()
        .iter()
        .map(|&fg| if fg { u32::MAX } else { 0 })
        .collect();
    let at = |d: &[u32], x: isize, y: isize| -> u32 {
        if x < 0 || y < 0 || x >= w as isize || y >= h as isize {
            0
        } else {
            d[y as usize * w + x as usize]
        }
    };

    for y in 0..h as isize {
        for x in 0..w as isize {
            let idx = y as usize * w + x as usize;
            if dist[idx] == 0 {
                continue;
            }
            let best = at(&dist, x - 1, y)
                .min(at(&dist, x - 1, y - 1))
                .min(at(&dist, x, y - 1))
                .min(at(&dist, x + 1, y - 1));
            dist[idx] = dist[idx].min(best.saturating_add(1));
        }
    }
    for y in (0..h as isize).rev() {
        for x in (0..w as isize).rev() {
            let idx = y as usize * w + x as usize;
            if dist[idx] == 0 {
                continue;
            }
            let best = at(&dist, x + 1, y)
                .min(at(&dist, x + 1, y + 1))
                .min(at(&dist, x, y + 1))
                .min(at(&dist, x - 1, y + 1));
            dist[idx] = dist[idx].min(best.saturating_add(1));
        }
    }
    dist
}

/// Discrete pole of inaccessibility: the foreground pixel farthest (Chebyshev)
/// from background or the image border. Ties go to the first pixel in raster
/// order.
pub fn anchor_point(mask: &BinaryMask) -> Result<Point> {
    let dist = chebyshev_distance(mask);
    let w = mask.width() as usize;
    let mut best: Option<(usize, u32)> = None;
    for (idx, &d) in dist.iter().enumerate() {
        if d > 0 && best.is_none_or(|(_, bd)| d > bd) {
            best = Some((idx, d));
        }
    }
    let (idx, _) = best.ok_or(Error::EmptyMask)?;
    Ok(Point {
        x: (idx % w) as u32,
        y: (idx / w) as u32,
    })
}
