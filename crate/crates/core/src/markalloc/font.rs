/// 5x7 digit glyphs. Each row's low five bits are pixels, bit 4 leftmost.
const DIGITS: [[u8; 7]; 10] = [
    [0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E],
    [0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E],
    [0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F],
    [0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E],
    [0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02],
    [0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E],
    [0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E],
    [0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08],
    [0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E],
    [0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C],
];

pub const GLYPH_WIDTH: u32 = 5;
pub const GLYPH_HEIGHT: u32 = 7;
/// Blank columns between adjacent glyphs, before scaling.
pub const GLYPH_SPACING: u32 = 1;

/// Whether unscaled glyph pixel `(col, row)` of `digit` is ink.
pub fn glyph_pixel(digit: u8, col: u32, row: u32) -> bool {
    debug_assert!(digit < 10 && col < GLYPH_WIDTH && row < GLYPH_HEIGHT);
    DIGITS[digit as usize][row as usize] & (0x10 >> col) != 0
}

pub fn digits_of(n: u32) -> Vec<u8> {
    n.to_string().bytes().map(|b| b - b'0').collect()
}

/// Unscaled width of `n` rendered as a digit string.
pub fn text_width(n: u32) -> u32 {
    let d = digits_of(n).len() as u32;
    d * GLYPH_WIDTH + (d - 1) * GLYPH_SPACING
}
