//! COCO run-length encoding.
//!
//! Runs are column-major and alternate background/foreground, starting with
//! background. The compressed string form is the pycocotools variant: each
//! count is a sequence of 5-bit groups offset by 48, delta-coded against the
//! count two positions back from the third entry on.

use super::mask::{checked_pixels, BinaryMask};
use crate::error::{Error, Result};

/// Inflates `counts` for a mask of `size = (height, width)`.
pub fn decode_rle(size: (u32, u32), counts: &[u32]) -> Result<BinaryMask> {
    let (height, width) = size;
    let total = checked_pixels(width, height)? as u64;
    let sum: u64 = counts.iter().map(|c| u64::from(*c)).sum();
    if sum != total {
        return Err(Error::Dimension(format!(
            "run lengths sum to {sum}, expected {height}x{width} = {total}"
        )));
    }
    let mut mask = BinaryMask::new(width, height)?;
    if height == 0 {
        return Ok(mask);
    }
    let mut pos: u64 = 0;
    let mut foreground = false;
    for &run in counts {
        if foreground {
            for k in pos..pos + u64::from(run) {
                let x = (k / u64::from(height)) as u32;
                let y = (k % u64::from(height)) as u32;
                mask.set(x, y, true);
            }
        }
        pos += u64::from(run);
        foreground = !foreground;
    }
    Ok(mask)
}

/// Inverse of [`decode_rle`]: column-major runs, first run is background
/// (possibly zero-length).
pub fn encode_rle(mask: &BinaryMask) -> Vec<u32> {
    let mut counts = Vec::new();
    let mut current = false;
    let mut run: u32 = 0;
    for x in 0..mask.width() {
        for y in 0..mask.height() {
            let bit = mask.get(x, y);
            if bit != current {
                counts.push(run);
                run = 0;
                current = bit;
            }
            run += 1;
        }
    }
    counts.push(run);
    counts
}

/// Parses the compressed string form of COCO counts.
pub fn counts_from_string(s: &str) -> Result<Vec<u32>> {
    let bytes = s.as_bytes();
    let mut counts: Vec<u32> = Vec::new();
    let mut p = 0;
    while p < bytes.len() {
        let mut x: i64 = 0;
        let mut k: u32 = 0;
        loop {
            let Some(&byte) = bytes.get(p) else {
                return Err(Error::InvalidAnnotation(
                    "truncated compressed RLE string".into(),
                ));
            };
            let c = i64::from(byte) - 48;
            if !(0..64).contains(&c) {
                return Err(Error::InvalidAnnotation(format!(
                    "byte {byte:#04x} outside the RLE alphabet at {p}"
                )));
            }
            if k >= 12 {
                return Err(Error::InvalidAnnotation(format!(
                    "RLE count starting before {p} is too long"
                )));
            }
            x |= (c & 0x1f) << (5 * k);
            p += 1;
            k += 1;
            if c & 0x20 == 0 {
                if c & 0x10 != 0 {
                    x |= -1i64 << (5 * k);
                }
                break;
            }
        }
        let m = counts.len();
        if m > 2 {
            x += i64::from(counts[m - 2]);
        }
        let value = u32::try_from(x).map_err(|_| {
            Error::InvalidAnnotation(format!("RLE count {x} out of range at entry {m}"))
        })?;
        counts.push(value);
    }
    Ok(counts)
}

/// Compresses counts into the string form accepted by [`counts_from_string`].
pub fn counts_to_string(counts: &[u32]) -> String {
    let mut out = String::new();
    for (i, &c) in counts.iter().enumerate() {
        let mut x = i64::from(c);
        if i > 2 {
            x -= i64::from(counts[i - 2]);
        }
        loop {
            let mut group = x & 0x1f;
            x >>= 5;
            let more = if group & 0x10 != 0 { x != -1 } else { x != 0 };
            if more {
                group |= 0x20;
            }
            out.push(char::from((group + 48) as u8));
            if !more {
                break;
            }
        }
    }
    out
}
