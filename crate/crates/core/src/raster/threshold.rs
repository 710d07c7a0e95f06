use super::image::{BinaryImage, GrayImage};

pub fn histogram(img: &GrayImage) -> [u64; 256] {
    let mut hist = [0u64; 256];
    for &p in img.pixels() {
        hist[p as usize] += 1;
    }
    hist
}

/// Between-class variance `w0 * w1 * (mu0 - mu1)^2` for the split
/// `{v <= t}` / `{v > t}`, with weights as fractions of the total.
pub fn between_class_variance(hist: &[u64; 256], t: u8) -> f64 {
    let total: u64 = hist.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let (mut n0, mut s0) = (0u64, 0u64);
    for (v, &c) in hist.iter().enumerate().take(t as usize + 1) {
        n0 += c;
        s0 += c * v as u64;
    }
    let s_all: u64 = hist.iter().enumerate().map(|(v, &c)| c * v as u64).sum();
    let n1 = total - n0;
    if n0 == 0 || n1 == 0 {
        return 0.0;
    }
    let mu0 = s0 as f64 / n0 as f64;
    let mu1 = (s_all - s0) as f64 / n1 as f64;
    let w0 = n0 as f64 / total as f64;
    let w1 = n1 as f64 / total as f64;
    w0 * w1 * (mu0 - mu1) * (mu0 - mu1)
}

/// Otsu threshold with border-majority polarity.
///
/// The threshold maximizes between-class variance over all 256 splits. When
/// several consecutive thresholds tie because the bins between them are empty,
/// the middle of that plateau is returned. Pixels on the same side of the
/// threshold as the majority of border pixels become background (`false`).
/// A uniform image yields its own value as threshold and an empty mask.
pub fn otsu_threshold(img: &GrayImage) -> (BinaryImage, u8) {
    let hist = histogram(img);
    let t = otsu_level(&hist).unwrap_or_else(|| img.get(0, 0));

    let border = img.border_pixels();
    let dark_border = border.iter().filter(|&&p| p <= t).count();
    let background_is_dark = dark_border * 2 >= border.len();
    let mask = img.map(|p| if background_is_dark { p > t } else { p <= t });
    (mask, t)
}

/// Variance-maximizing level, `None` when the image holds a single value.
pub fn otsu_level(hist: &[u64; 256]) -> Option<u8> {
    let mut best = 0.0f64;
    let mut best_t: Option<u8> = None;
    for t in 0..=255u8 {
        let v = between_class_variance(hist, t);
        if v > best * (1.0 + 1e-12) {
            best = v;
            best_t = Some(t);
        }
    }
    let first = best_t?;
    let mut last = first;
    while last < 255 && hist[last as usize + 1] == 0 {
        last += 1;
    }
    // `last + 1` is the first occupied bin above; the plateau spans [first, last].
    Some(((first as u16 + last as u16) / 2) as u8)
}
