use super::image::{Image, Rgb};

/// Pixel types that can be bilinearly resampled.
pub trait Interpolate: Copy {
    fn bilinear(p00: Self, p10: Self, p01: Self, p11: Self, fx: f64, fy: f64) -> Self;
    /// Median of a non-empty slice, used as background estimate.
    fn median(values: &[Self]) -> Self;
}

fn lerp2(a: f64, b: f64, c: f64, d: f64, fx: f64, fy: f64) -> f64 {
    let top = a + (b - a) * fx;
    let bottom = c + (d - c) * fx;
    top + (bottom - top) * fy
}

impl Interpolate for u8 {
    fn bilinear(p00: u8, p10: u8, p01: u8, p11: u8, fx: f64, fy: f64) -> u8 {
        lerp2(p00 as f64, p10 as f64, p01 as f64, p11 as f64, fx, fy)
            .round()
            .clamp(0.0, 255.0) as u8
    }

    fn median(values: &[u8]) -> u8 {
        let mut v = values.to_vec();
        v.sort_unstable();
        v[v.len() / 2]
    }
}

impl Interpolate for Rgb {
    fn bilinear(p00: Rgb, p10: Rgb, p01: Rgb, p11: Rgb, fx: f64, fy: f64) -> Rgb {
        let mut out = [0u8; 3];
        for (c, slot) in out.iter_mut().enumerate() {
            *slot = u8::bilinear(p00.0[c], p10.0[c], p01.0[c], p11.0[c], fx, fy);
        }
        Rgb(out)
    }

    fn median(values: &[Rgb]) -> Rgb {
        Rgb::median_of(values)
    }
}

fn quarter_turns(angle: f64) -> Option<u32> {
    let q = angle / 90.0;
    let r = q.round();
    ((q - r).abs() < 1e-9).then(|| r.rem_euclid(4.0) as u32)
}

/// Exact counter-clockwise rotation by `turns` quarter turns.
pub fn rotate_quarter<P: Copy>(img: &Image<P>, turns: u32) -> Image<P> {
    let (w, h) = (img.width(), img.height());
    match turns % 4 {
        0 => img.clone(),
        1 => Image::from_fn(h, w, |x, y| img.get(w - 1 - y, x)),
        2 => Image::from_fn(w, h, |x, y| img.get(w - 1 - x, h - 1 - y)),
        _ => Image::from_fn(h, w, |x, y| img.get(y, h - 1 - x)),
    }
}

/// Size of the canvas holding a `w x h` image rotated by `angle` degrees.
pub fn rotated_extent(w: usize, h: usize, angle: f64) -> (usize, usize) {
    let (s, c) = angle.to_radians().sin_cos();
    let nw = (w as f64 * c.abs() + h as f64 * s.abs() - 1e-6).ceil().max(1.0) as usize;
    let nh = (w as f64 * s.abs() + h as f64 * c.abs() - 1e-6).ceil().max(1.0) as usize;
    (nw, nh)
}

/// Map an output pixel center back to continuous source coordinates.
fn inverse_map(
    (w, h): (usize, usize),
    (nw, nh): (usize, usize),
    angle: f64,
) -> impl Fn(usize, usize) -> (f64, f64) {
    let (s, c) = angle.to_radians().sin_cos();
    let (cx, cy) = (w as f64 / 2.0, h as f64 / 2.0);
    let (ncx, ncy) = (nw as f64 / 2.0, nh as f64 / 2.0);
    move |x, y| {
        let dx = x as f64 + 0.5 - ncx;
        let dy = y as f64 + 0.5 - ncy;
        (dx * c - dy * s + cx, dx * s + dy * c + cy)
    }
}

/// Rotate counter-clockwise (as displayed) by `angle` degrees about the
/// image center.
///
/// Multiples of 90 degrees are exact pixel permutations. Other angles use
/// bilinear resampling onto a canvas large enough for the rotated extent;
/// uncovered pixels take the median border color of the input.
pub fn rotate_image<P: Interpolate>(img: &Image<P>, angle: f64) -> Image<P> {
    if let Some(turns) = quarter_turns(angle) {
        return rotate_quarter(img, turns);
    }
    let fill = P::median(&img.border_pixels());
    let (w, h) = (img.width(), img.height());
    let (nw, nh) = rotated_extent(w, h, angle);
    let map = inverse_map((w, h), (nw, nh), angle);
    Image::from_fn(nw, nh, |x, y| {
        let (sx, sy) = map(x, y);
        sample_bilinear(img, sx - 0.5, sy - 0.5, fill)
    })
}

/// Nearest-neighbour rotation with an explicit fill value; used to draw
/// crisp one-bit text at an angle.
pub fn rotate_nearest<P: Copy>(img: &Image<P>, angle: f64, fill: P) -> Image<P> {
    if let Some(turns) = quarter_turns(angle) {
        return rotate_quarter(img, turns);
    }
    let (w, h) = (img.width(), img.height());
    let (nw, nh) = rotated_extent(w, h, angle);
    let map = inverse_map((w, h), (nw, nh), angle);
    Image::from_fn(nw, nh, |x, y| {
        let (sx, sy) = map(x, y);
        img.get_checked(sx.floor() as i64, sy.floor() as i64)
            .unwrap_or(fill)
    })
}

fn sample_bilinear<P: Interpolate>(img: &Image<P>, x: f64, y: f64, fill: P) -> P {
    let x0 = x.floor();
    let y0 = y.floor();
    let fx = x - x0;
    let fy = y - y0;
    let (x0, y0) = (x0 as i64, y0 as i64);
    let at = |xx: i64, yy: i64| img.get_checked(xx, yy).unwrap_or(fill);
    P::bilinear(at(x0, y0), at(x0 + 1, y0), at(x0, y0 + 1), at(x0 + 1, y0 + 1), fx, fy)
}

/// Bilinear resize with clamp-to-edge sampling.
pub fn resize_bilinear<P: Interpolate>(img: &Image<P>, new_w: usize, new_h: usize) -> Image<P> {
    let (w, h) = (img.width(), img.height());
    if (new_w, new_h) == (w, h) {
        return img.clone();
    }
    let sx = w as f64 / new_w as f64;
    let sy = h as f64 / new_h as f64;
    Image::from_fn(new_w, new_h, |x, y| {
        let fx = ((x as f64 + 0.5) * sx - 0.5).clamp(0.0, (w - 1) as f64);
        let fy = ((y as f64 + 0.5) * sy - 0.5).clamp(0.0, (h - 1) as f64);
        let x0 = fx.floor() as i64;
        let y0 = fy.floor() as i64;
        P::bilinear(
            img.get_clamped(x0, y0),
            img.get_clamped(x0 + 1, y0),
            img.get_clamped(x0, y0 + 1),
            img.get_clamped(x0 + 1, y0 + 1),
            fx - x0 as f64,
            fy - y0 as f64,
        )
    })
}
