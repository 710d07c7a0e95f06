//! Text recognition: deskew, height normalization and pluggable engines.

mod builtin;
mod deskew;
mod external;

pub use builtin::{read_at_angle, read_binary, read_gray, BuiltinEngine, Reading, REJECT_DISTANCE};
pub use deskew::{deskew, deskew_binary, deskew_with_hint, normalize_height, projection_score};
pub use external::ExternalEngine;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::raster::{otsu_threshold, rotate_image, BinaryImage, GrayImage, RasterImage};

/// Height in pixels crops are scaled to before recognition.
pub const TARGET_HEIGHT: usize = 130;

pub trait OcrEngine: Send + Sync {
    fn name(&self) -> &str;

    /// Whether the engine copes with text that was not deskewed.
    fn supports_rotated(&self) -> bool;

    fn recognize(&self, img: &RasterImage) -> Result<String>;
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum EngineKind {
    #[default]
    Builtin,
    External,
}

impl std::str::FromStr for EngineKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "builtin" => Ok(EngineKind::Builtin),
            "external" => Ok(EngineKind::External),
            other => Err(crate::Error::invalid(format!("unknown OCR engine {other:?}"))),
        }
    }
}

/// Result of reading one isolated text line.
#[derive(Debug, Clone, PartialEq)]
pub struct LineReading {
    pub text: String,
    /// Counter-clockwise angle of the text that deskewing undid.
    pub angle: f64,
    /// Decoding cost; zero for a clean match with the embedded font.
    pub cost: f64,
}

/// Measured angles this close to a multiple of 45 degrees are read at that
/// multiple first; the measured angle is tried too unless the first reading
/// is clean, and the cheaper decoding wins.
const SNAP_WINDOW: f64 = 10.0;

/// A decoding costing at most this much per character is taken without
/// trying other angles.
const CLEAN_COST_PER_CHAR: f64 = 2.0;

fn read_padded(gray: &GrayImage, padded: &BinaryImage, angle: f64) -> LineReading {
    if angle % 90.0 != 0.0 {
        let r = read_at_angle(padded, angle);
        return LineReading { text: r.text, angle, cost: r.cost };
    }
    let upright = if angle == 0.0 { gray.clone() } else { rotate_image(gray, -angle) };
    match upright_crop(&upright) {
        Some(c) => {
            let r = read_gray(&normalize_height(&c, TARGET_HEIGHT));
            LineReading { text: r.text, angle, cost: r.cost }
        }
        None => LineReading { text: String::new(), angle, cost: 0.0 },
    }
}

/// Read a single text line given as an ink mask with the built-in engine:
/// deskew, crop to the ink, scale to [`TARGET_HEIGHT`] and decode. Lines at
/// angles other than quarter turns are decoded in their own frame by
/// [`read_at_angle`] instead.
pub fn read_line(mask: &BinaryImage, hint: Option<f64>) -> LineReading {
    const PAD: usize = 4;
    let gray = GrayImage::from_fn(mask.width() + 2 * PAD, mask.height() + 2 * PAD, |x, y| {
        let inside = x >= PAD && y >= PAD && x < mask.width() + PAD && y < mask.height() + PAD;
        if inside && mask.get(x - PAD, y - PAD) {
            0
        } else {
            255
        }
    });
    let padded = gray.map(|v| v == 0);
    let angle = deskew_binary(&padded, hint);
    let snapped = (angle / 45.0).round() * 45.0;
    let snapped = if snapped <= -90.0 { snapped + 180.0 } else { snapped };
    if snapped == angle || (angle - snapped).abs() > SNAP_WINDOW {
        return read_padded(&gray, &padded, angle);
    }
    let first = read_padded(&gray, &padded, snapped);
    if first.cost <= CLEAN_COST_PER_CHAR * first.text.chars().count().max(1) as f64 {
        return first;
    }
    let second = read_padded(&gray, &padded, angle);
    if second.cost < first.cost - 1e-9 {
        second
    } else {
        first
    }
}

/// Tight crop around the dark pixels of a deskewed line with a one-pixel
/// margin.
fn upright_crop(img: &GrayImage) -> Option<GrayImage> {
    let (mask, _) = otsu_threshold(img);
    let b = mask.foreground_bbox()?.inflate(1).intersect(&img.bounds())?;
    img.crop(b)
}
