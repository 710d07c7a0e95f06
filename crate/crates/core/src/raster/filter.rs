use super::image::{GrayImage, RasterImage};
use crate::error::{Error, Result};

/// Rec.601 luminance: `round(0.299 R + 0.587 G + 0.114 B)`.
pub fn to_grayscale(img: &RasterImage) -> GrayImage {
    img.map(|p| p.luma())
}

/// Median over a `kernel x kernel` window with clamp-to-edge borders.
///
/// Uses a sliding 256-bin histogram per row, so cost is O(kernel) per pixel.
pub fn median_filter(img: &GrayImage, kernel: usize) -> Result<GrayImage> {
    if kernel == 0 || kernel.is_multiple_of(2) {
        return Err(Error::invalid(format!(
            "median kernel must be odd and positive, got {kernel}"
        )));
    }
    if kernel == 1 {
        return Ok(img.clone());
    }
    let r = (kernel / 2) as i64;
    let (w, h) = (img.width(), img.height());
    let half = (kernel * kernel / 2) as u32;
    let mut out = Vec::with_capacity(w * h);

    for y in 0..h as i64 {
        let mut hist = [0u32; 256];
        for dy in -r..=r {
            for dx in -r..=r {
                hist[img.get_clamped(dx, y + dy) as usize] += 1;
            }
        }
        // Running median: `below` counts window values strictly less than `med`.
        let mut med = 0usize;
        let mut below = 0u32;
        while below + hist[med] <= half {
            below += hist[med];
            med += 1;
        }
        out.push(med as u8);

        for x in 1..w as i64 {
            for dy in -r..=r {
                let old = img.get_clamped(x - r - 1, y + dy) as usize;
                let new = img.get_clamped(x + r, y + dy) as usize;
                hist[old] -= 1;
                if old < med {
                    below -= 1;
                }
                hist[new] += 1;
                if new < med {
                    below += 1;
                }
            }
            while below > half {
                med -= 1;
                below -= hist[med];
            }
            while below + hist[med] <= half {
                below += hist[med];
                med += 1;
            }
            out.push(med as u8);
        }
    }
    GrayImage::new(w, h, out)
}
