use super::image::{BinaryImage, GrayImage};
use crate::error::{Error, Result};

const SIGMA: f64 = 1.4;

fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let r = (3.0 * sigma).ceil() as i64;
    let mut k: Vec<f64> = (-r..=r)
        .map(|i| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let s: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= s);
    k
}

/// Separable Gaussian blur with clamp-to-edge, returning floats.
pub fn gaussian_blur(img: &GrayImage, sigma: f64) -> Vec<f64> {
    let (w, h) = (img.width(), img.height());
    let k = gaussian_kernel(sigma);
    let r = (k.len() / 2) as i64;
    let src: Vec<f64> = img.pixels().iter().map(|&p| p as f64).collect();
    let mut tmp = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (i, kv) in k.iter().enumerate() {
                let xx = (x as i64 + i as i64 - r).clamp(0, w as i64 - 1) as usize;
                acc += kv * src[y * w + xx];
            }
            tmp[y * w + x] = acc;
        }
    }
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (i, kv) in k.iter().enumerate() {
                let yy = (y as i64 + i as i64 - r).clamp(0, h as i64 - 1) as usize;
                acc += kv * tmp[yy * w + x];
            }
            out[y * w + x] = acc;
        }
    }
    out
}

/// Canny edge detector: Gaussian smoothing (sigma 1.4), Sobel gradients,
/// non-maximum suppression and hysteresis between `low` and `high` on the
/// L2 gradient magnitude.
pub fn canny(img: &GrayImage, low: f64, high: f64) -> Result<BinaryImage> {
    if !(low >= 0.0 && low <= high) {
        return Err(Error::invalid(format!(
            "canny thresholds must satisfy 0 <= low <= high, got {low} > {high}"
        )));
    }
    let (w, h) = (img.width(), img.height());
    let blurred = gaussian_blur(img, SIGMA);
    let at = |x: i64, y: i64| {
        let xx = x.clamp(0, w as i64 - 1) as usize;
        let yy = y.clamp(0, h as i64 - 1) as usize;
        blurred[yy * w + xx]
    };

    let mut mag = vec![0.0; w * h];
    let mut dir = vec![0u8; w * h];
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let gx = (at(x + 1, y - 1) + 2.0 * at(x + 1, y) + at(x + 1, y + 1))
                - (at(x - 1, y - 1) + 2.0 * at(x - 1, y) + at(x - 1, y + 1));
            let gy = (at(x - 1, y + 1) + 2.0 * at(x, y + 1) + at(x + 1, y + 1))
                - (at(x - 1, y - 1) + 2.0 * at(x, y - 1) + at(x + 1, y - 1));
            let i = y as usize * w + x as usize;
            mag[i] = (gx * gx + gy * gy).sqrt();
            let mut theta = gy.atan2(gx).to_degrees();
            if theta < 0.0 {
                theta += 180.0;
            }
            dir[i] = if !(22.5..157.5).contains(&theta) {
                0
            } else if theta < 67.5 {
                1
            } else if theta < 112.5 {
                2
            } else {
                3
            };
        }
    }

    let m = |x: i64, y: i64| {
        if x < 0 || y < 0 || x >= w as i64 || y >= h as i64 {
            0.0
        } else {
            mag[y as usize * w + x as usize]
        }
    };
    // 0: strong, 1: weak, 2: suppressed
    let mut class = vec![2u8; w * h];
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let i = y as usize * w + x as usize;
            let v = mag[i];
            if v < low {
                continue;
            }
            let (dx, dy) = match dir[i] {
                0 => (1, 0),
                1 => (1, 1),
                2 => (0, 1),
                _ => (-1, 1),
            };
            // Strict on one side, non-strict on the other so plateaus keep one pixel.
            if v > m(x - dx, y - dy) && v >= m(x + dx, y + dy) {
                class[i] = if v >= high { 0 } else { 1 };
            }
        }
    }

    let mut out = vec![false; w * h];
    let mut stack: Vec<usize> = (0..w * h).filter(|&i| class[i] == 0).collect();
    for &i in &stack {
        out[i] = true;
    }
    while let Some(i) = stack.pop() {
        let (x, y) = ((i % w) as i64, (i / w) as i64);
        for dy in -1..=1 {
            for dx in -1..=1 {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                    continue;
                }
                let j = ny as usize * w + nx as usize;
                if class[j] == 1 && !out[j] {
                    out[j] = true;
                    stack.push(j);
                }
            }
        }
    }
    BinaryImage::new(w, h, out)
}
