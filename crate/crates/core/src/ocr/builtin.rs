use crate::error::Result;
use crate::font::{atlas, CELL};
use crate::raster::{otsu_threshold, rotate_quarter, to_grayscale, BBox, BinaryImage, GrayImage, RasterImage};

use super::OcrEngine;

/// Glyph cells further than this many bits from every atlas glyph are
/// reported as U+FFFD (20% of an 8x8 cell).
pub const REJECT_DISTANCE: f64 = 0.2 * (CELL * CELL) as f64;

/// Widest mismatch between measured and hypothesized column counts, in
/// font pixels.
const COLUMN_SLACK: f64 = 0.35;

/// Grid hypotheses whose cell impurity exceeds the best one by more than
/// this are not decoded.
const IMPURITY_SLACK: f64 = 4.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Reading {
    pub text: String,
    /// Cell impurity plus glyph Hamming distances of the chosen decoding.
    pub cost: f64,
    pub upside_down: bool,
}

/// Exact matcher for the embedded bitmap font.
#[derive(Debug, Clone, Copy, Default)]
pub struct BuiltinEngine;

impl OcrEngine for BuiltinEngine {
    fn name(&self) -> &str {
        "builtin"
    }

    fn supports_rotated(&self) -> bool {
        false
    }

    fn recognize(&self, img: &RasterImage) -> Result<String> {
        Ok(read_gray(&to_grayscale(img)).text)
    }
}

pub fn read_gray(img: &GrayImage) -> Reading {
    read_binary(&otsu_threshold(img).0)
}

/// Decode a one-line ink mask, trying it both as given and turned 180
/// degrees.
pub fn read_binary(mask: &BinaryImage) -> Reading {
    let upright = read_oriented(mask);
    let flipped = match &upright {
        Some(u) if u.1 <= 1e-6 => None,
        _ => read_oriented(&rotate_quarter(mask, 2)),
    };
    match (upright, flipped) {
        (None, _) => Reading {
            text: String::new(),
            cost: 0.0,
            upside_down: false,
        },
        (Some(u), Some(f)) if f.1 < u.1 - 1e-9 => Reading {
            text: f.0,
            cost: f.1,
            upside_down: true,
        },
        (Some(u), _) => Reading {
            text: u.0,
            cost: u.1,
            upside_down: false,
        },
    }
}

/// Summed-area table over a box of a mask; fractional queries are exact
/// for the piecewise-constant image.
struct Coverage {
    w: usize,
    h: usize,
    sums: Vec<f64>,
}

impl Coverage {
    fn new(mask: &BinaryImage, b: BBox) -> Self {
        let (w, h) = (b.w as usize, b.h as usize);
        let mut sums = vec![0.0; (w + 1) * (h + 1)];
        for y in 0..h {
            let mut row = 0.0;
            for x in 0..w {
                if mask.get(b.x as usize + x, b.y as usize + y) {
                    row += 1.0;
                }
                sums[(y + 1) * (w + 1) + x + 1] = sums[y * (w + 1) + x + 1] + row;
            }
        }
        Coverage { w, h, sums }
    }

    fn at(&self, x: usize, y: usize) -> f64 {
        self.sums[y * (self.w + 1) + x]
    }

    fn integral(&self, x: f64, y: f64) -> f64 {
        let x = x.clamp(0.0, self.w as f64);
        let y = y.clamp(0.0, self.h as f64);
        let (x0, y0) = ((x.floor() as usize).min(self.w.saturating_sub(1)), (y.floor() as usize).min(self.h.saturating_sub(1)));
        let (fx, fy) = (x - x0 as f64, y - y0 as f64);
        let s00 = self.at(x0, y0);
        let s10 = self.at(x0 + 1, y0);
        let s01 = self.at(x0, y0 + 1);
        let s11 = self.at(x0 + 1, y0 + 1);
        s00 * (1.0 - fx) * (1.0 - fy) + s10 * fx * (1.0 - fy) + s01 * (1.0 - fx) * fy + s11 * fx * fy
    }

    /// Mean coverage of `[x0, x1) x [y0, y1)`.
    fn mean(&self, x0: f64, y0: f64, x1: f64, y1: f64) -> f64 {
        let area = (x1 - x0) * (y1 - y0);
        if area <= 0.0 {
            return 0.0;
        }
        (self.integral(x1, y1) - self.integral(x0, y1) - self.integral(x1, y0) + self.integral(x0, y0)) / area
    }
}

struct Grid {
    rows: usize,
    cols: usize,
    bits: Vec<bool>,
    impurity: f64,
}

/// Impurity is the mis-covered area of the cells' inner boxes, measured in
/// units of the smallest font pixel any hypothesis could have, so grids of
/// different pitch are comparable.
fn sample_grid(cov: &Coverage, rows: usize, cols: usize) -> Grid {
    let sy = cov.h as f64 / rows as f64;
    let sx = cov.w as f64 / cols as f64;
    let unit = cov.h as f64 / CELL as f64;
    let weight = 0.49 * sx * sy / (unit * unit);
    let mut bits = Vec::with_capacity(rows * cols);
    let mut impurity = 0.0;
    for i in 0..rows {
        let y = i as f64 * sy;
        for j in 0..cols {
            let x = j as f64 * sx;
            let centre = cov.mean(x + 0.3 * sx, y + 0.3 * sy, x + 0.7 * sx, y + 0.7 * sy);
            let inner = cov.mean(x + 0.15 * sx, y + 0.15 * sy, x + 0.85 * sx, y + 0.85 * sy);
            bits.push(centre >= 0.5);
            impurity += inner.min(1.0 - inner) * weight;
        }
    }
    Grid {
        rows,
        cols,
        bits,
        impurity,
    }
}

fn nearest_glyph(cell: u64) -> (char, u32) {
    let mut best = (' ', u32::MAX);
    for &(ch, g) in atlas() {
        let d = (g ^ cell).count_ones();
        if d < best.1 {
            best = (ch, d);
        }
    }
    best
}

/// Best decoding of `grid` over vertical font-row offsets and horizontal
/// column phases: `(text, distance, rows, v0, u)`.
fn decode_grid(grid: &Grid) -> (String, f64, usize, usize, usize) {
    let mut best: Option<(String, f64, usize, usize, usize)> = None;
    for u in 0..CELL {
        let glyphs = (u + grid.cols).div_ceil(CELL);
        let mut cells = vec![0u64; glyphs];
        for i in 0..grid.rows {
            for j in 0..grid.cols {
                if grid.bits[i * grid.cols + j] {
                    let col = u + j;
                    cells[col / CELL] |= 1 << (i * CELL + col % CELL);
                }
            }
        }
        for v0 in 0..=CELL - grid.rows {
            let mut text = String::with_capacity(glyphs);
            let mut dist = 0.0;
            for &c in &cells {
                let (ch, d) = nearest_glyph(c << (v0 * CELL));
                dist += d as f64;
                text.push(if d as f64 > REJECT_DISTANCE { '\u{FFFD}' } else { ch });
            }
            let better = match &best {
                None => true,
                Some(b) => dist < b.1 - 1e-9,
            };
            if better {
                best = Some((text, dist, grid.rows, v0, u));
            }
        }
    }
    best.expect("at least one phase is tried")
}

fn read_oriented(mask: &BinaryImage) -> Option<(String, f64)> {
    let b = mask.foreground_bbox()?;
    let cov = Coverage::new(mask, b);
    let (w, h) = (b.w as f64, b.h as f64);

    let mut grids = Vec::new();
    for rows in 1..=CELL {
        let s = h / rows as f64;
        let c = w / s;
        // A one-pixel error in the measured height shifts the column count
        // in proportion to the line length.
        let slack = COLUMN_SLACK + c * 1.5 / h;
        let lo = (c - slack).ceil().max(1.0) as usize;
        let hi = (c + slack).floor() as usize;
        for n in lo..=hi {
            grids.push(sample_grid(&cov, rows, n));
        }
    }
    let floor = grids.iter().map(|g| g.impurity).fold(f64::INFINITY, f64::min);

    let mut best: Option<(String, f64, usize)> = None;
    for g in grids.iter().filter(|g| g.impurity <= floor + IMPURITY_SLACK) {
        let (text, dist, rows, _, _) = decode_grid(g);
        let cost = g.impurity + dist;
        let better = match &best {
            None => true,
            Some(bst) => cost < bst.1 - 1e-9 || ((cost - bst.1).abs() <= 1e-9 && rows > bst.2),
        };
        if better {
            best = Some((text, cost, rows));
        }
    }
    best.map(|(t, c, _)| (t, c))
}

/// Pixel samples of a line expressed in its own reading frame: `u` along
/// the baseline, `v` downward across it.
struct FrameSamples {
    points: Vec<(f64, f64, bool)>,
    u_min: f64,
    u_max: f64,
    v_min: f64,
    v_max: f64,
}

impl FrameSamples {
    fn new(mask: &BinaryImage, angle: f64) -> Option<Self> {
        let b = mask.foreground_bbox()?.inflate(2).intersect(&mask.bounds())?;
        let (s, c) = angle.to_radians().sin_cos();
        let mut points = Vec::with_capacity(b.area() as usize);
        let (mut u_min, mut u_max, mut v_min, mut v_max) =
            (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for y in b.y..b.bottom() {
            for x in b.x..b.right() {
                let (px, py) = (x as f64 + 0.5, y as f64 + 0.5);
                let u = px * c - py * s;
                let v = px * s + py * c;
                let ink = mask.get(x as usize, y as usize);
                if ink {
                    u_min = u_min.min(u);
                    u_max = u_max.max(u);
                    v_min = v_min.min(v);
                    v_max = v_max.max(v);
                }
                points.push((u, v, ink));
            }
        }
        Some(FrameSamples {
            points,
            u_min,
            u_max,
            v_min,
            v_max,
        })
    }

    /// Majority vote of the samples falling in each cell of a `rows x cols`
    /// grid with pitch `pitch` and top-left corner `(u0, v0)`.
    fn vote(&self, rows: usize, cols: usize, pitch: f64, u0: f64, v0: f64, unit: f64) -> Grid {
        let mut ink = vec![0u32; rows * cols];
        let mut total = vec![0u32; rows * cols];
        // Inked samples outside the grid count against it too.
        let mut stray = 0u32;
        for &(u, v, on) in &self.points {
            let j = ((u - u0) / pitch).floor();
            let i = ((v - v0) / pitch).floor();
            if i < 0.0 || j < 0.0 || i >= rows as f64 || j >= cols as f64 {
                stray += on as u32;
                continue;
            }
            let k = i as usize * cols + j as usize;
            total[k] += 1;
            ink[k] += on as u32;
        }
        let mut impurity = 0.0;
        let bits = ink
            .iter()
            .zip(&total)
            .map(|(&a, &t)| {
                impurity += a.min(t - a) as f64;
                2 * a > t
            })
            .collect();
        Grid {
            rows,
            cols,
            bits,
            impurity: (impurity + stray as f64) / (unit * unit),
        }
    }
}

/// Best grid registration near a coarse estimate: a search over pitch and
/// origin at double step, then a single-step polish around the winner.
fn register(fs: &FrameSamples, rows: usize, cols: usize, pitch: f64, unit: f64) -> Grid {
    let grid_at = |ks: i32, ku: i32, kv: i32| {
        let p = pitch * (1.0 + 0.015 * ks as f64);
        fs.vote(rows, cols, p, fs.u_min - 0.1 * ku as f64, fs.v_min - 0.1 * kv as f64, unit)
    };
    let mut best: Option<(Grid, (i32, i32, i32))> = None;
    let consider = |g: Grid, k: (i32, i32, i32), best: &mut Option<(Grid, (i32, i32, i32))>| {
        if best.as_ref().is_none_or(|b| g.impurity < b.0.impurity - 1e-9) {
            *best = Some((g, k));
        }
    };
    for ks in (-4..=4).step_by(2) {
        for ku in (0..=8).step_by(2) {
            for kv in (0..=8).step_by(2) {
                consider(grid_at(ks, ku, kv), (ks, ku, kv), &mut best);
            }
        }
    }
    let (s0, u0, v0) = best.as_ref().expect("search space is non-empty").1;
    for ks in s0 - 1..=s0 + 1 {
        for ku in (u0 - 1).max(0)..=(u0 + 1).min(8) {
            for kv in (v0 - 1).max(0)..=(v0 + 1).min(8) {
                if (ks, ku, kv) != (s0, u0, v0) {
                    consider(grid_at(ks, ku, kv), (ks, ku, kv), &mut best);
                }
            }
        }
    }
    best.expect("search space is non-empty").0
}

fn read_frame(mask: &BinaryImage, angle: f64) -> Option<(String, f64)> {
    let fs = FrameSamples::new(mask, angle)?;
    // Sample spacing is one pixel, so ink extents fall short of the shape
    // by about half a pixel on each side.
    let h = fs.v_max - fs.v_min + 1.0;
    let w = fs.u_max - fs.u_min + 1.0;
    let unit = h / CELL as f64;

    let mut coarse = Vec::new();
    for rows in 1..=CELL {
        let pitch = h / rows as f64;
        let c = w / pitch;
        let slack = COLUMN_SLACK + c * 1.5 / h;
        let lo = (c - slack).ceil().max(1.0) as usize;
        let hi = (c + slack).floor() as usize;
        for n in lo..=hi {
            let g = fs.vote(rows, n, w / n as f64, fs.u_min - 0.35, fs.v_min - 0.35, unit);
            coarse.push((g.impurity, rows, n));
        }
    }
    let floor = coarse.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);

    let mut best: Option<(String, f64, usize)> = None;
    for &(_, rows, n) in coarse.iter().filter(|c| c.0 <= floor + IMPURITY_SLACK * 4.0) {
        let g = register(&fs, rows, n, w / n as f64, unit);
        let (text, dist, _, _, _) = decode_grid(&g);
        let cost = g.impurity + dist;
        let better = match &best {
            None => true,
            Some(b) => cost < b.1 - 1e-9 || ((cost - b.1).abs() <= 1e-9 && rows > b.2),
        };
        if better {
            best = Some((text, cost, rows));
        }
    }
    best.map(|(t, c, _)| (t, c))
}

/// Decode a line drawn at `angle` degrees straight from its pixels, without
/// resampling: every pixel votes for the font cell its center falls in.
/// Suited to one-bit text rotated by angles other than quarter turns, where
/// resampling would erase font pixels a couple of image pixels wide.
pub fn read_at_angle(mask: &BinaryImage, angle: f64) -> Reading {
    let upright = read_frame(mask, angle);
    let flipped = match &upright {
        Some(u) if u.1 <= 1e-6 => None,
        _ => read_frame(mask, angle + 180.0),
    };
    match (upright, flipped) {
        (None, _) => Reading {
            text: String::new(),
            cost: 0.0,
            upside_down: false,
        },
        (Some(u), Some(f)) if f.1 < u.1 - 1e-9 => Reading {
            text: f.0,
            cost: f.1,
            upside_down: true,
        },
        (Some(u), _) => Reading {
            text: u.0,
            cost: u.1,
            upside_down: false,
        },
    }
}
