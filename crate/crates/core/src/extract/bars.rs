use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{
    area_open, connected_components, default_min_area, median_filter, otsu_threshold, BBox, Component,
    Connectivity, GrayImage, RasterImage, Rgb,
};
use crate::textdetect::estimate_background;

use super::ExtractConfig;

/// The side of a bar that rests on its axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Bottom,
    Left,
    Top,
    Right,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::Bottom, Side::Left, Side::Top, Side::Right];

    /// Bars on this side grow up or down.
    pub fn grows_vertically(self) -> bool {
        matches!(self, Side::Bottom | Side::Top)
    }

    /// Unit step pointing away from the axis, in image coordinates.
    fn outward(self) -> (i64, i64) {
        match self {
            Side::Bottom => (0, -1),
            Side::Top => (0, 1),
            Side::Left => (1, 0),
            Side::Right => (-1, 0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarMark {
    pub bbox: BBox,
    pub color: Rgb,
    pub base: Side,
    /// Pixel boundary at which the bar meets its axis line.
    pub baseline: i32,
    pub length_px: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
}

impl BarMark {
    /// Pixel boundary at the end of the bar away from the axis.
    pub fn far_edge(&self) -> i32 {
        match self.base {
            Side::Bottom => self.baseline - self.length_px,
            Side::Top | Side::Left => self.baseline + self.length_px,
            Side::Right => self.baseline - self.length_px,
        }
    }

    /// Center of the bar across its length: x for bars growing vertically.
    pub fn cross_center(&self) -> f64 {
        let (cx, cy) = self.bbox.center();
        if self.base.grows_vertically() {
            cx
        } else {
            cy
        }
    }

    /// The pixel `i` steps out from the axis along the bar's midline.
    fn midline_pixel(&self, i: i32) -> (i64, i64) {
        let (dx, dy) = self.base.outward();
        let c = self.cross_center().floor() as i64;
        let start = match self.base {
            Side::Bottom | Side::Right => self.baseline as i64 - 1,
            Side::Top | Side::Left => self.baseline as i64,
        };
        if self.base.grows_vertically() {
            (c, start + dy * i as i64)
        } else {
            (start + dx * i as i64, c)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StackSegment {
    /// Index of the parent bar.
    pub bar: usize,
    pub color: Rgb,
    /// Start and end along the bar, in pixels from the axis.
    pub span_px: (f64, f64),
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series: Option<String>,
}

impl StackSegment {
    pub fn length_px(&self) -> f64 {
        self.span_px.1 - self.span_px.0
    }
}

/// Color distance of every pixel from the image background, saturating at
/// 255.
pub fn background_distance(img: &RasterImage) -> GrayImage {
    let bg = estimate_background(img);
    img.map(|p: Rgb| p.distance(&bg).round().min(255.0) as u8)
}

/// Solid regions of the image that are not text: distance from the
/// background, median filter, Otsu threshold, small-area removal and
/// connected components, dropping any component that touches one of
/// `text_boxes`.
pub fn mark_components(img: &RasterImage, text_boxes: &[BBox], cfg: &ExtractConfig) -> Result<Vec<Component>> {
    let smooth = median_filter(&background_distance(img), cfg.median_kernel)?;
    let (mask, _) = otsu_threshold(&smooth);
    let min_area = cfg.min_area.unwrap_or_else(|| default_min_area(img.width(), img.height()));
    let mask = area_open(&mask, min_area);
    Ok(connected_components(&mask, Connectivity::Eight)
        .into_iter()
        .filter(|c| !text_boxes.iter().any(|t| t.inflate(1).overlaps(&c.bbox)))
        .collect())
}

/// Where a component meets a straight dark line on `side`, as the pixel
/// boundary between the two. The line must span the component and run on
/// past it.
fn axis_contact(img: &RasterImage, b: &BBox, side: Side, cfg: &ExtractConfig) -> Option<i32> {
    let dark = |x: i64, y: i64| img.get_checked(x, y).is_some_and(|p| p.luma() <= cfg.axis_luma_max);
    let vertical = side.grows_vertically();
    let (c0, c1) = if vertical { (b.x as i64, b.right() as i64) } else { (b.y as i64, b.bottom() as i64) };
    if c1 - c0 < 4 {
        return None;
    }
    let probe = c0 + (c1 - c0) / 4;
    let (cx, cy) = b.center();
    let (dx, dy) = side.outward();
    let (mut x, mut y) = (cx.floor() as i64, cy.floor() as i64);
    if vertical {
        x = probe;
    } else {
        y = probe;
    }
    let limit = match side {
        Side::Bottom => b.bottom() as i64,
        Side::Top => b.y as i64 - 1,
        Side::Left => b.x as i64 - 1,
        Side::Right => b.right() as i64,
    };
    loop {
        if dark(x, y) {
            break;
        }
        let at = if vertical { y } else { x };
        if at == limit {
            return None;
        }
        x -= dx;
        y -= dy;
    }
    let line = if vertical { y } else { x };
    let on = |c: i64| if vertical { dark(c, line) } else { dark(line, c) };
    let covered = (c0 + 2..c1 - 2).filter(|&c| on(c)).count() as i64;
    if covered * 10 < (c1 - c0 - 4) * 9 || !(on(c0 - 2) || on(c1 + 1)) {
        return None;
    }
    Some(match side {
        Side::Bottom | Side::Right => line as i32,
        Side::Top | Side::Left => line as i32 + 1,
    })
}

/// Locate the bars of a bar chart. Marks are the solid components resting on
/// a common axis line; the side with most such marks wins, so the same
/// procedure serves both orientations. Bars come out in order along the
/// axis.
pub fn extract_bars(img: &RasterImage, text_boxes: &[BBox], cfg: &ExtractConfig) -> Result<Vec<BarMark>> {
    let comps = mark_components(img, text_boxes, cfg)?;
    if comps.is_empty() {
        return Err(Error::ExtractionFailure("no solid marks found".into()));
    }
    let mut groups: BTreeMap<(Side, i32), Vec<usize>> = BTreeMap::new();
    for (i, c) in comps.iter().enumerate() {
        for side in Side::ALL {
            if let Some(line) = axis_contact(img, &c.bbox, side, cfg) {
                groups.entry((side, line)).or_default().push(i);
            }
        }
    }
    let area = |members: &Vec<usize>| members.iter().map(|&i| comps[i].pixel_count).sum::<usize>();
    let Some((&(side, baseline), members)) = groups
        .iter()
        .max_by(|a, b| a.1.len().cmp(&b.1.len()).then(area(a.1).cmp(&area(b.1))).then(b.0.cmp(a.0)))
    else {
        return Err(Error::ExtractionFailure("no marks rest on an axis line".into()));
    };

    let mut bars: Vec<BarMark> = members
        .iter()
        .filter_map(|&i| bar_from_component(img, &comps[i], side, baseline, cfg))
        .collect();
    if bars.is_empty() {
        return Err(Error::ExtractionFailure("all bars degenerate".into()));
    }
    bars.sort_by(|a, b| a.cross_center().total_cmp(&b.cross_center()));
    Ok(bars)
}

fn bar_from_component(img: &RasterImage, c: &Component, base: Side, baseline: i32, cfg: &ExtractConfig) -> Option<BarMark> {
    let b = c.bbox;
    let far = match base {
        Side::Bottom => b.y,
        Side::Top => b.bottom(),
        Side::Left => b.right(),
        Side::Right => b.x,
    };
    let mut bar = BarMark {
        bbox: b,
        color: Rgb::default(),
        base,
        baseline,
        length_px: (far - baseline).abs(),
        value: None,
    };
    // The filtered mask can bleed onto a spine at the far end.
    while bar.length_px > 0 {
        let (x, y) = bar.midline_pixel(bar.length_px - 1);
        if img.get_checked(x, y).is_some_and(|p| p.luma() > cfg.axis_luma_max) {
            break;
        }
        bar.length_px -= 1;
    }
    // It can also close a thin gap of plot background before the spine.
    if let Some(bg) = beside_color(img, &bar) {
        while bar.length_px > 0 {
            let (x, y) = bar.midline_pixel(bar.length_px - 1);
            if img.get_checked(x, y).is_none_or(|p| p.distance(&bg) > cfg.color_jump) {
                break;
            }
            bar.length_px -= 1;
        }
    }
    if bar.length_px <= 0 {
        return None;
    }
    let (lo, hi) = (baseline.min(bar.far_edge()), baseline.max(bar.far_edge()));
    bar.bbox = if base.grows_vertically() {
        BBox::from_corners(b.x, lo, b.right(), hi)
    } else {
        BBox::from_corners(lo, b.y, hi, b.bottom())
    };
    let colors: Vec<Rgb> = (0..bar.length_px).filter_map(|i| {
        let (x, y) = bar.midline_pixel(i);
        img.get_checked(x, y)
    }).collect();
    bar.color = Rgb::median_of(&colors);
    Some(bar)
}

/// Typical color just outside the bar's long sides.
fn beside_color(img: &RasterImage, bar: &BarMark) -> Option<Rgb> {
    const GAP: i64 = 3;
    let b = bar.bbox;
    let step = (bar.length_px / 16).max(1);
    let mut samples = Vec::new();
    for i in (0..bar.length_px).step_by(step as usize) {
        let (x, y) = bar.midline_pixel(i);
        let sides = if bar.base.grows_vertically() {
            [(b.x as i64 - GAP, y), (b.right() as i64 - 1 + GAP, y)]
        } else {
            [(x, b.y as i64 - GAP), (x, b.bottom() as i64 - 1 + GAP)]
        };
        samples.extend(sides.iter().filter_map(|&(sx, sy)| img.get_checked(sx, sy)));
    }
    (!samples.is_empty()).then(|| Rgb::median_of(&samples))
}

/// Split a bar into stacked segments by walking its midline outward from
/// the axis and cutting wherever neighboring pixels differ in color by more
/// than the configured jump. A run of adjacent jumps (an anti-aliased edge)
/// is one cut placed at its center.
pub fn extract_stacks(bar: &BarMark, bar_index: usize, img: &RasterImage, cfg: &ExtractConfig) -> Result<Vec<StackSegment>> {
    let samples: Vec<Rgb> = (0..bar.length_px)
        .map(|i| {
            let (x, y) = bar.midline_pixel(i);
            img.get_checked(x, y)
        })
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::DegenerateBar("bar midline leaves the image".into()))?;
    if samples.len() < 2 {
        return Err(Error::DegenerateBar(format!("midline of {} px", samples.len())));
    }
    let jumps: Vec<usize> = (0..samples.len() - 1)
        .filter(|&i| samples[i].distance(&samples[i + 1]) > cfg.color_jump)
        .collect();
    let mut cuts: Vec<(usize, usize)> = Vec::new();
    for j in jumps {
        match cuts.last_mut() {
            Some(last) if j - last.1 <= cfg.transition_width => last.1 = j,
            _ => cuts.push((j, j)),
        }
    }
    let n = samples.len();
    let mut edges = vec![(0.0, 0usize, 0usize)];
    for &(a, b) in &cuts {
        let at = (a + b) as f64 / 2.0 + 1.0;
        // A sliver is not a segment of its own.
        if at - edges[edges.len() - 1].0 < cfg.min_segment_px || n as f64 - at < cfg.min_segment_px {
            continue;
        }
        edges.push((at, a + 1, b + 1));
    }
    edges.push((n as f64, n, n));
    let mut out = Vec::new();
    for w in edges.windows(2) {
        let (start, _, first) = w[0];
        let (end, last, _) = w[1];
        let inner = if first < last { &samples[first..last] } else { &samples[first.min(n - 1)..=first.min(n - 1)] };
        out.push(StackSegment {
            bar: bar_index,
            color: Rgb::median_of(inner),
            span_px: (start, end),
            value: None,
            series: None,
        });
    }
    Ok(out)
}
