use serde::{Deserialize, Serialize};

use super::image::{BBox, BinaryImage, RasterImage, Rgb};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Connectivity {
    Four,
    #[default]
    Eight,
}

impl Connectivity {
    fn offsets(self) -> &'static [(i64, i64)] {
        const FOUR: [(i64, i64); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];
        const EIGHT: [(i64, i64); 8] = [
            (1, 0),
            (-1, 0),
            (0, 1),
            (0, -1),
            (1, 1),
            (1, -1),
            (-1, 1),
            (-1, -1),
        ];
        match self {
            Connectivity::Four => &FOUR,
            Connectivity::Eight => &EIGHT,
        }
    }
}

/// A maximal connected set of foreground pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    /// Dense label starting at 1, in order of first pixel in raster scan.
    pub label: u32,
    pub pixel_count: usize,
    pub bbox: BBox,
    pub pixels: Vec<(u32, u32)>,
}

impl Component {
    /// Channel-wise median color of the component's pixels in `img`.
    pub fn median_color(&self, img: &RasterImage) -> Rgb {
        let colors: Vec<Rgb> = self
            .pixels
            .iter()
            .map(|&(x, y)| img.get(x as usize, y as usize))
            .collect();
        Rgb::median_of(&colors)
    }

    pub fn centroid(&self) -> (f64, f64) {
        let n = self.pixels.len() as f64;
        let (sx, sy) = self
            .pixels
            .iter()
            .fold((0.0, 0.0), |(sx, sy), &(x, y)| (sx + x as f64, sy + y as f64));
        (sx / n + 0.5, sy / n + 0.5)
    }

    /// Fraction of the bounding box covered by the component.
    pub fn fill_ratio(&self) -> f64 {
        self.pixel_count as f64 / self.bbox.area().max(1) as f64
    }
}

/// Label connected foreground regions.
///
/// Components are returned in the order their first pixel is met in a
/// top-to-bottom, left-to-right scan, with labels `1..=n` in that order.
pub fn connected_components(img: &BinaryImage, connectivity: Connectivity) -> Vec<Component> {
    let (w, h) = (img.width(), img.height());
    let mut visited = vec![false; w * h];
    let mut out = Vec::new();
    let mut stack: Vec<(usize, usize)> = Vec::new();

    for y0 in 0..h {
        for x0 in 0..w {
            let idx = y0 * w + x0;
            if visited[idx] || !img.pixels()[idx] {
                continue;
            }
            visited[idx] = true;
            stack.push((x0, y0));
            let mut pixels = Vec::new();
            let (mut min_x, mut min_y, mut max_x, mut max_y) = (x0, y0, x0, y0);
            while let Some((x, y)) = stack.pop() {
                pixels.push((x as u32, y as u32));
                min_x = min_x.min(x);
                max_x = max_x.max(x);
                min_y = min_y.min(y);
                max_y = max_y.max(y);
                for &(dx, dy) in connectivity.offsets() {
                    let nx = x as i64 + dx;
                    let ny = y as i64 + dy;
                    if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                        continue;
                    }
                    let nidx = ny as usize * w + nx as usize;
                    if !visited[nidx] && img.pixels()[nidx] {
                        visited[nidx] = true;
                        stack.push((nx as usize, ny as usize));
                    }
                }
            }
            pixels.sort_unstable_by_key(|&(x, y)| (y, x));
            out.push(Component {
                label: out.len() as u32 + 1,
                pixel_count: pixels.len(),
                bbox: BBox::from_corners(
                    min_x as i32,
                    min_y as i32,
                    max_x as i32 + 1,
                    max_y as i32 + 1,
                ),
                pixels,
            });
        }
    }
    out
}

/// Remove 8-connected foreground components smaller than `min_area` pixels.
pub fn area_open(img: &BinaryImage, min_area: usize) -> BinaryImage {
    if min_area == 0 {
        return img.clone();
    }
    let mut out = img.clone();
    for comp in connected_components(img, Connectivity::Eight) {
        if comp.pixel_count < min_area {
            for &(x, y) in &comp.pixels {
                out.set(x as usize, y as usize, false);
            }
        }
    }
    out
}

/// Default area-opening threshold for an image of the given size.
pub fn default_min_area(width: usize, height: usize) -> usize {
    ((width * height) as f64 * 1e-4).ceil().max(25.0) as usize
}
