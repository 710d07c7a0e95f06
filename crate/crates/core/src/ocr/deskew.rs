use crate::raster::{
    min_bounding_rect, otsu_threshold, resize_bilinear, rotate_image, to_grayscale, BinaryImage,
    Image, RasterImage,
};
use crate::raster::Interpolate;

/// Sharpness of the row profile of `points` after rotating them by
/// `-angle`: the sum of squared half-pixel bin counts. Horizontal text
/// lines score highest when viewed at their own angle.
pub fn projection_score(points: &[(f64, f64)], angle: f64) -> f64 {
    if points.is_empty() {
        return 0.0;
    }
    let (s, c) = angle.to_radians().sin_cos();
    let ys: Vec<f64> = points.iter().map(|&(x, y)| x * s + y * c).collect();
    let lo = ys.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    const BIN: f64 = 0.5;
    let mut bins = vec![0u64; ((hi - lo) / BIN) as usize + 3];
    for y in ys {
        bins[((y - lo) / BIN) as usize + 1] += 1;
    }
    bins.iter().map(|&b| (b * b) as f64).sum()
}

fn wrap_half_turn(a: f64) -> f64 {
    let mut a = a % 180.0;
    if a > 90.0 {
        a -= 180.0;
    } else if a <= -90.0 {
        a += 180.0;
    }
    a
}

fn snap_quarter(a: f64) -> f64 {
    let q = (a / 90.0).round() * 90.0;
    if (a - q).abs() <= 0.5 {
        q
    } else {
        a
    }
}

/// Estimate the reading angle of the text in `mask`, in degrees
/// counter-clockwise within `(-90, 90]`.
///
/// Without a hint the minimum-area rectangle gives two candidates a quarter
/// turn apart; the one with the sharper row profile wins. The angle is then
/// refined by a profile search within 3 degrees in 0.1 degree steps.
pub fn deskew_binary(mask: &BinaryImage, hint: Option<f64>) -> f64 {
    let points: Vec<(f64, f64)> = mask
        .foreground_points()
        .into_iter()
        .map(|(x, y)| (x as f64 + 0.5, y as f64 + 0.5))
        .collect();
    if points.len() < 2 {
        return 0.0;
    }
    let coarse = match hint {
        Some(h) => wrap_half_turn(h),
        None => {
            let rect = min_bounding_rect(&points).expect("non-empty point set");
            let a = rect.angle;
            let b = wrap_half_turn(a + 90.0);
            if projection_score(&points, b) > projection_score(&points, a) {
                b
            } else {
                a
            }
        }
    };
    let mut best = (projection_score(&points, coarse), coarse);
    for k in 1..=30 {
        for d in [k as f64 * 0.1, -(k as f64) * 0.1] {
            let a = coarse + d;
            let s = projection_score(&points, a);
            if s > best.0 * (1.0 + 1e-12) {
                best = (s, a);
            }
        }
    }
    wrap_half_turn(snap_quarter(best.1))
}

fn deskew_image<P: Interpolate>(img: &Image<P>, mask: &BinaryImage, hint: Option<f64>) -> (Image<P>, f64) {
    if mask.count_foreground() == 0 {
        return (img.clone(), 0.0);
    }
    let angle = deskew_binary(mask, hint);
    if angle == 0.0 {
        return (img.clone(), 0.0);
    }
    (rotate_image(img, -angle), angle)
}

/// Rotate a text crop so its baseline is horizontal. Returns the rotated
/// crop and the text angle that was undone.
pub fn deskew(img: &RasterImage) -> (RasterImage, f64) {
    let (mask, _) = otsu_threshold(&to_grayscale(img));
    deskew_image(img, &mask, None)
}

/// [`deskew`] seeded with an approximate angle from layout analysis.
pub fn deskew_with_hint<P: Interpolate>(img: &Image<P>, mask: &BinaryImage, hint: f64) -> (Image<P>, f64) {
    deskew_image(img, mask, Some(hint))
}

/// Uniformly scale `img` to `target` pixels high.
pub fn normalize_height<P: Interpolate>(img: &Image<P>, target: usize) -> Image<P> {
    let (w, h) = (img.width(), img.height());
    if h == target || h == 0 {
        return img.clone();
    }
    let new_w = ((w as f64 * target as f64 / h as f64).round() as usize).max(1);
    resize_bilinear(img, new_w, target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chartgen::render_text_crop;
    use crate::raster::Rgb;

    fn crop(text: &str, scale: usize, rot: u32) -> RasterImage {
        render_text_crop(text, scale, rot, Rgb::new(30, 30, 30), Rgb::new(250, 250, 245), 6)
    }

    #[test]
    fn horizontal_text_is_left_alone() {
        let (out, a) = deskew(&crop("Revenue 2019", 2, 0));
        assert!(a.abs() <= 1.0, "{a}");
        assert_eq!(out, crop("Revenue 2019", 2, 0));
    }

    #[test]
    fn quarter_turn_text_is_realigned() {
        let (out, a) = deskew(&crop("Total Sales", 2, 90));
        assert!((a - 90.0).abs() <= 1.0, "{a}");
        assert!(out.width() > out.height());
    }

    #[test]
    fn diagonal_text_is_realigned() {
        for s in [2, 3] {
            let (_, a) = deskew(&crop("Apples", s, 45));
            assert!((a - 45.0).abs() <= 1.0, "{a}");
        }
    }

    #[test]
    fn second_pass_is_a_no_op() {
        let (once, _) = deskew(&crop("Market Share", 3, 45));
        let (_, again) = deskew(&once);
        assert!(again.abs() <= 1.0, "{again}");
    }

    #[test]
    fn blank_crop_is_returned_unchanged() {
        let img = RasterImage::filled(20, 10, Rgb::WHITE);
        assert_eq!(deskew(&img), (img.clone(), 0.0));
    }

    #[test]
    fn height_normalization_scales_uniformly() {
        let img = RasterImage::filled(40, 65, Rgb::WHITE);
        let out = normalize_height(&img, 130);
        assert_eq!((out.width(), out.height()), (80, 130));
        let same = RasterImage::filled(7, 130, Rgb::WHITE);
        assert_eq!(normalize_height(&same, 130), same);
    }
}
