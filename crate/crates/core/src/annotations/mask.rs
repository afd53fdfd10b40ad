use crate::error::{Error, Result};

/// Upper bound on the pixel count of any mask materialized from untrusted input.
pub const MAX_MASK_PIXELS: usize = 1 << 26;

/// Per-object bitmask, stored row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: u32,
    height: u32,
    bits: Vec<bool>,
}

impl std::fmt::Debug for BinaryMask {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "BinaryMask {}x{} area={}", self.width, self.height, self.area())?;
        if self.bits.len() <= 64 * 64 {
            for y in 0..self.height {
                let row: String = (0..self.width)
                    .map(|x| if self.get(x, y) { '#' } else { '.' })
                    .collect();
                writeln!(f, "{row}")?;
            }
        }
        Ok(())
    }
}

impl BinaryMask {
    pub fn new(width: u32, height: u32) -> Result<Self> {
        let len = checked_pixels(width, height)?;
        Ok(BinaryMask {
            width,
            height,
            bits: vec![false; len],
        })
    }

    /// Builds a mask from a row-major boolean grid.
    pub fn from_bits(width: u32, height: u32, bits: Vec<bool>) -> Result<Self> {
        let len = checked_pixels(width, height)?;
        if bits.len() != len {
            return Err(Error::Dimension(format!(
                "{} bits supplied for a {width}x{height} mask",
                bits.len()
            )));
        }
        Ok(BinaryMask {
            width,
            height,
            bits,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> bool {
        self.bits[y as usize * self.width as usize + x as usize]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, value: bool) {
        let w = self.width as usize;
        self.bits[y as usize * w + x as usize] = value;
    }

    /// Exact popcount.
    pub fn area(&self) -> u64 {
        self.bits.iter().filter(|b| **b).count() as u64
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|b| *b)
    }

    /// In-place union; both masks must share dimensions.
    pub fn union_with(&mut self, other: &BinaryMask) -> Result<()> {
        self.check_same_dims(other)?;
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a |= *b;
        }
        Ok(())
    }

    /// True when every foreground pixel of `self` is also set in `other`.
    pub fn is_subset_of(&self, other: &BinaryMask) -> bool {
        self.width == other.width
            && self.height == other.height
            && self.bits.iter().zip(&other.bits).all(|(a, b)| !*a || *b)
    }

    fn check_same_dims(&self, other: &BinaryMask) -> Result<()> {
        if self.width != other.width || self.height != other.height {
            return Err(Error::Dimension(format!(
                "{}x{} vs {}x{}",
                self.width, self.height, other.width, other.height
            )));
        }
        Ok(())
    }
}

/// Free-function form of [`BinaryMask::area`].
pub fn mask_area(mask: &BinaryMask) -> u64 {
    mask.area()
}

pub(crate) fn checked_pixels(width: u32, height: u32) -> Result<usize> {
    let len = (width as usize)
        .checked_mul(height as usize)
        .filter(|n| *n <= MAX_MASK_PIXELS)
        .ok_or_else(|| {
            Error::Dimension(format!("{width}x{height} exceeds {MAX_MASK_PIXELS} pixels"))
        })?;
    Ok(len)
}
