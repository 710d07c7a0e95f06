use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An 8-bit sRGB triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Rgb(pub [u8; 3]);

impl Rgb {
    pub const WHITE: Rgb = Rgb([255, 255, 255]);
    pub const BLACK: Rgb = Rgb([0, 0, 0]);

    pub const fn new(r: u8, g: u8, b: u8) -> Self {
        Rgb([r, g, b])
    }

    /// Euclidean distance in RGB space.
    pub fn distance(&self, other: &Rgb) -> f64 {
        let d: i32 = self
            .0
            .iter()
            .zip(other.0.iter())
            .map(|(&a, &b)| {
                let d = a as i32 - b as i32;
                d * d
            })
            .sum();
        (d as f64).sqrt()
    }

    /// Rec.601 luma, rounded and clamped to a byte.
    pub fn luma(&self) -> u8 {
        let [r, g, b] = self.0;
        let y = 0.299 * r as f64 + 0.587 * g as f64 + 0.114 * b as f64;
        y.round().clamp(0.0, 255.0) as u8
    }

    /// Spread between the largest and smallest channel.
    pub fn chroma(&self) -> u8 {
        let max = *self.0.iter().max().unwrap();
        let min = *self.0.iter().min().unwrap();
        max - min
    }

    /// Channel-wise median of a non-empty slice of colors.
    pub fn median_of(colors: &[Rgb]) -> Rgb {
        assert!(!colors.is_empty(), "median of empty color list");
        let mut out = [0u8; 3];
        let mut channel: Vec<u8> = Vec::with_capacity(colors.len());
        for (c, slot) in out.iter_mut().enumerate() {
            channel.clear();
            channel.extend(colors.iter().map(|p| p.0[c]));
            channel.sort_unstable();
            *slot = channel[channel.len() / 2];
        }
        Rgb(out)
    }
}

/// Row-major image with `width * height` pixels of type `P`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Image<P> {
    width: usize,
    height: usize,
    pixels: Vec<P>,
}

/// Full-color raster as decoded from a PNG.
pub type RasterImage = Image<Rgb>;
/// 8-bit luminance image.
pub type GrayImage = Image<u8>;
/// Foreground (`true`) / background (`false`) mask.
pub type BinaryImage = Image<bool>;

impl<P: Copy> Image<P> {
    pub fn new(width: usize, height: usize, pixels: Vec<P>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invalid(format!(
                "image dimensions must be positive, got {width}x{height}"
            )));
        }
        if pixels.len() != width * height {
            return Err(Error::invalid(format!(
                "pixel buffer holds {} values, expected {}",
                pixels.len(),
                width * height
            )));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    /// Image of the given size with every pixel set to `value`.
    ///
    /// Panics if either dimension is zero.
    pub fn filled(width: usize, height: usize, value: P) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be positive");
        Self {
            width,
            height,
            pixels: vec![value; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> P) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be positive");
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            pixels,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[P] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [P] {
        &mut self.pixels
    }

    pub fn into_pixels(self) -> Vec<P> {
        self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> P {
        self.pixels[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: P) {
        self.pixels[y * self.width + x] = value;
    }

    /// Pixel at signed coordinates, `None` outside the image.
    #[inline]
    pub fn get_checked(&self, x: i64, y: i64) -> Option<P> {
        if x < 0 || y < 0 || x >= self.width as i64 || y >= self.height as i64 {
            None
        } else {
            Some(self.get(x as usize, y as usize))
        }
    }

    /// Pixel with coordinates clamped into the image.
    #[inline]
    pub fn get_clamped(&self, x: i64, y: i64) -> P {
        let x = x.clamp(0, self.width as i64 - 1) as usize;
        let y = y.clamp(0, self.height as i64 - 1) as usize;
        self.get(x, y)
    }

    pub fn map<Q: Copy>(&self, f: impl Fn(P) -> Q) -> Image<Q> {
        Image {
            width: self.width,
            height: self.height,
            pixels: self.pixels.iter().map(|&p| f(p)).collect(),
        }
    }

    /// Copy of the part of `rect` that lies inside the image.
    ///
    /// Returns `None` when the intersection is empty.
    pub fn crop(&self, rect: BBox) -> Option<Self> {
        let r = rect.intersect(&self.bounds())?;
        let mut pixels = Vec::with_capacity((r.w * r.h) as usize);
        for y in r.y..r.bottom() {
            let start = y as usize * self.width + r.x as usize;
            pixels.extend_from_slice(&self.pixels[start..start + r.w as usize]);
        }
        Some(Self {
            width: r.w as usize,
            height: r.h as usize,
            pixels,
        })
    }

    pub fn bounds(&self) -> BBox {
        BBox::new(0, 0, self.width as i32, self.height as i32)
    }

    /// Pixels along the outer one-pixel frame, clockwise from the top-left.
    pub fn border_pixels(&self) -> Vec<P> {
        let (w, h) = (self.width, self.height);
        let mut out = Vec::with_capacity(2 * (w + h));
        for x in 0..w {
            out.push(self.get(x, 0));
        }
        for y in 1..h {
            out.push(self.get(w - 1, y));
        }
        if h > 1 {
            for x in (0..w.saturating_sub(1)).rev() {
                out.push(self.get(x, h - 1));
            }
        }
        if w > 1 {
            for y in (1..h.saturating_sub(1)).rev() {
                out.push(self.get(0, y));
            }
        }
        out
    }
}

impl BinaryImage {
    pub fn count_foreground(&self) -> usize {
        self.pixels.iter().filter(|&&p| p).count()
    }

    /// Coordinates of all foreground pixels in scan order.
    pub fn foreground_points(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for y in 0..self.height {
            for x in 0..self.width {
                if self.get(x, y) {
                    out.push((x, y));
                }
            }
        }
        out
    }

    /// Tight box around the foreground, `None` for an empty mask.
    pub fn foreground_bbox(&self) -> Option<BBox> {
        let mut min_x = usize::MAX;
        let mut min_y = usize::MAX;
        let mut max_x = 0;
        let mut max_y = 0;
        let mut any = false;
        for y in 0..self.height {
            for x in 0..self.width {
                if self.get(x, y) {
                    any = true;
                    min_x = min_x.min(x);
                    max_x = max_x.max(x);
                    min_y = min_y.min(y);
                    max_y = max_y.max(y);
                }
            }
        }
        any.then(|| BBox::from_corners(min_x as i32, min_y as i32, max_x as i32 + 1, max_y as i32 + 1))
    }
}

/// Axis-aligned pixel rectangle covering `[x, x + w) x [y, y + h)`.
///
/// Serialized as a `[x, y, w, h]` array.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(from = "[i32; 4]", into = "[i32; 4]")]
pub struct BBox {
    pub x: i32,
    pub y: i32,
    pub w: i32,
    pub h: i32,
}

impl From<[i32; 4]> for BBox {
    fn from(v: [i32; 4]) -> Self {
        BBox::new(v[0], v[1], v[2], v[3])
    }
}

impl From<BBox> for [i32; 4] {
    fn from(b: BBox) -> Self {
        [b.x, b.y, b.w, b.h]
    }
}

impl BBox {
    pub const fn new(x: i32, y: i32, w: i32, h: i32) -> Self {
        Self { x, y, w, h }
    }

    /// Box spanning `[x0, x1) x [y0, y1)`.
    pub fn from_corners(x0: i32, y0: i32, x1: i32, y1: i32) -> Self {
        Self::new(x0, y0, (x1 - x0).max(0), (y1 - y0).max(0))
    }

    pub fn right(&self) -> i32 {
        self.x + self.w
    }

    pub fn bottom(&self) -> i32 {
        self.y + self.h
    }

    pub fn area(&self) -> i64 {
        self.w.max(0) as i64 * self.h.max(0) as i64
    }

    pub fn is_empty(&self) -> bool {
        self.w <= 0 || self.h <= 0
    }

    pub fn center(&self) -> (f64, f64) {
        (
            self.x as f64 + self.w as f64 / 2.0,
            self.y as f64 + self.h as f64 / 2.0,
        )
    }

    pub fn intersect(&self, other: &BBox) -> Option<BBox> {
        let x0 = self.x.max(other.x);
        let y0 = self.y.max(other.y);
        let x1 = self.right().min(other.right());
        let y1 = self.bottom().min(other.bottom());
        (x1 > x0 && y1 > y0).then(|| BBox::from_corners(x0, y0, x1, y1))
    }

    pub fn union(&self, other: &BBox) -> BBox {
        if self.is_empty() {
            return *other;
        }
        if other.is_empty() {
            return *self;
        }
        BBox::from_corners(
            self.x.min(other.x),
            self.y.min(other.y),
            self.right().max(other.right()),
            self.bottom().max(other.bottom()),
        )
    }

    pub fn overlaps(&self, other: &BBox) -> bool {
        self.intersect(other).is_some()
    }

    pub fn contains_point(&self, x: f64, y: f64) -> bool {
        x >= self.x as f64 && x < self.right() as f64 && y >= self.y as f64 && y < self.bottom() as f64
    }

    pub fn contains(&self, other: &BBox) -> bool {
        other.x >= self.x
            && other.y >= self.y
            && other.right() <= self.right()
            && other.bottom() <= self.bottom()
    }

    /// Grow by `pad` pixels on every side.
    pub fn inflate(&self, pad: i32) -> BBox {
        BBox::new(self.x - pad, self.y - pad, self.w + 2 * pad, self.h + 2 * pad)
    }

    /// Chebyshev gap between two boxes; zero when they touch or overlap.
    pub fn gap(&self, other: &BBox) -> i32 {
        let dx = (other.x - self.right()).max(self.x - other.right()).max(0);
        let dy = (other.y - self.bottom()).max(self.y - other.bottom()).max(0);
        dx.max(dy)
    }

    /// Intersection over union; zero for disjoint or empty boxes.
    pub fn iou(&self, other: &BBox) -> f64 {
        if self.is_empty() || other.is_empty() {
            return 0.0;
        }
        let inter = self.intersect(other).map_or(0, |b| b.area());
        let union = self.area() + other.area() - inter;
        if union <= 0 {
            0.0
        } else {
            inter as f64 / union as f64
        }
    }
}
