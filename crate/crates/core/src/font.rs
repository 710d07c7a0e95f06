//! The embedded 8x8 bitmap font shared by the chart renderer and the
//! built-in OCR engine.
//!
//! Glyph bitmaps are packed into a `u64` with bit `row * 8 + col` set for an
//! inked font pixel; column 0 is the leftmost.

use std::sync::OnceLock;

use font8x8::{UnicodeFonts, BASIC_FONTS};

use crate::raster::BinaryImage;

/// Font cell edge in font pixels.
pub const CELL: usize = 8;

/// Characters the renderer may emit in chart text. Every one of them keeps
/// column 7 empty, so neighbouring glyphs never touch.
pub const TEXT_CHARSET: &str =
    " ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789().,%-&'";

pub fn glyph_bits(ch: char) -> Option<u64> {
    let rows = BASIC_FONTS.get(ch)?;
    let mut bits = 0u64;
    for (r, row) in rows.iter().enumerate() {
        for c in 0..CELL {
            if (row >> c) & 1 == 1 {
                bits |= 1 << (r * CELL + c);
            }
        }
    }
    Some(bits)
}

/// Printable ASCII (32..=126) with their bitmaps.
pub fn atlas() -> &'static [(char, u64)] {
    static ATLAS: OnceLock<Vec<(char, u64)>> = OnceLock::new();
    ATLAS.get_or_init(|| {
        (32u8..=126)
            .filter_map(|b| glyph_bits(b as char).map(|g| (b as char, g)))
            .collect()
    })
}

pub fn bit(bits: u64, row: usize, col: usize) -> bool {
    (bits >> (row * CELL + col)) & 1 == 1
}

/// Rasterize `text` at integer `scale`, one `8 * scale` cell per char.
/// Unknown characters render as blank cells.
pub fn render_text(text: &str, scale: usize) -> BinaryImage {
    let n = text.chars().count().max(1);
    let cell = CELL * scale;
    let mut img = BinaryImage::filled(n * cell, cell, false);
    for (i, ch) in text.chars().enumerate() {
        let Some(g) = glyph_bits(ch) else { continue };
        for r in 0..CELL {
            for c in 0..CELL {
                if !bit(g, r, c) {
                    continue;
                }
                for dy in 0..scale {
                    for dx in 0..scale {
                        img.set(i * cell + c * scale + dx, r * scale + dy, true);
                    }
                }
            }
        }
    }
    img
}
