//! Text-line detection by connected-component grouping, and layout-rule
//! role assignment.

mod roles;

pub use roles::{assign_roles, estimate_background, structure_ink, AxisFrame, RoleConfig};

use serde::{Deserialize, Serialize};

use crate::raster::{connected_components, BBox, BinaryImage, Component, Connectivity, RasterImage, Rgb};
use crate::types::TextRole;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DetectConfig {
    /// Pixels darker than this and no more saturated than `ink_chroma_max`
    /// are text ink.
    pub ink_luma_max: u8,
    pub ink_chroma_max: u8,
    /// Components up to this multiple of the median component box area are
    /// glyphs.
    pub glyph_area_factor: f64,
    /// Glyphs whose centroids are within this multiple of the glyph pitch
    /// form a word.
    pub link_factor: f64,
    /// Words whose nearest glyphs are within this multiple of the pitch and
    /// which lie on a common baseline form a line.
    pub merge_factor: f64,
    /// Largest offset across the baseline, as a multiple of the pitch, for
    /// two words to share a line.
    pub baseline_factor: f64,
}

impl Default for DetectConfig {
    fn default() -> Self {
        DetectConfig {
            ink_luma_max: 68,
            ink_chroma_max: 60,
            glyph_area_factor: 4.0,
            link_factor: 1.45,
            merge_factor: 2.4,
            baseline_factor: 0.5,
        }
    }
}

/// One detected line of text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TextRegion {
    pub bbox: BBox,
    pub role: Option<TextRole>,
    pub confidence: f64,
    pub text: String,
    /// Counter-clockwise reading angle estimate in degrees, `(-90, 90]`.
    pub rotation_hint: f64,
    /// Whether `rotation_hint` was measured; a single glyph has no
    /// reading direction of its own.
    #[serde(skip)]
    pub hint_reliable: bool,
    #[serde(skip)]
    pub glyph_count: usize,
    /// Ink of this line only, aligned with `bbox`.
    #[serde(skip)]
    pub mask: BinaryImage,
    /// Color of the swatch beside a legend entry.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub patch_color: Option<Rgb>,
}

impl TextRegion {
    pub fn center(&self) -> (f64, f64) {
        self.bbox.center()
    }

    /// Extent of the line across its reading direction, roughly.
    pub fn thickness(&self) -> f64 {
        let (w, h) = (self.bbox.w as f64, self.bbox.h as f64);
        if self.is_horizontal() {
            h
        } else if self.is_vertical() {
            w
        } else {
            w.min(h) / 2.0
        }
    }

    pub fn is_horizontal(&self) -> bool {
        self.rotation_hint.abs() < 10.0
    }

    pub fn is_vertical(&self) -> bool {
        self.rotation_hint.abs() > 80.0
    }
}

pub fn ink_mask(img: &RasterImage, cfg: &DetectConfig) -> BinaryImage {
    img.map(|p: Rgb| p.luma() < cfg.ink_luma_max && p.chroma() < cfg.ink_chroma_max)
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v[v.len() / 2]
}

/// Split ink components into glyph-sized ones and the rest (axes, ticks).
pub fn split_glyphs(comps: Vec<Component>, cfg: &DetectConfig) -> (Vec<Component>, Vec<Component>) {
    if comps.is_empty() {
        return (Vec::new(), Vec::new());
    }
    let mut areas: Vec<f64> = comps.iter().map(|c| c.bbox.area() as f64).collect();
    let limit = cfg.glyph_area_factor * median(&mut areas);
    comps.into_iter().partition(|c| (c.bbox.area() as f64) <= limit)
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, i: usize) -> usize {
        let mut r = i;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut i = i;
        while self.0[i] != r {
            let next = self.0[i];
            self.0[i] = r;
            i = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.0[hi] = lo;
        true
    }
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

/// Principal direction of a point cloud as a screen angle in `(-90, 90]`
/// and the ratio of its principal spreads (>= 1).
pub fn principal_axis(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    if points.len() < 2 {
        return (0.0, 1.0);
    }
    let (mx, my) = points.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (mx, my) = (mx / n, my / n);
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for &(x, y) in points {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    let theta = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    let tr = (sxx + syy) / 2.0;
    let det = ((sxx - syy) / 2.0).hypot(sxy);
    let (l1, l2) = (tr + det, (tr - det).max(1e-12));
    // Image y points down, so the screen angle flips sign.
    let mut a = -theta.to_degrees();
    if a <= -90.0 {
        a += 180.0;
    }
    if a > 90.0 {
        a -= 180.0;
    }
    (a, (l1 / l2).sqrt())
}

struct Group {
    members: Vec<usize>,
    /// Reading direction in degrees when it is measurable.
    direction: Option<f64>,
    centroid: (f64, f64),
}

fn group_of(members: Vec<usize>, glyphs: &[Component]) -> Group {
    let pts: Vec<(f64, f64)> = members
        .iter()
        .flat_map(|&i| glyphs[i].pixels.iter().map(|&(x, y)| (x as f64 + 0.5, y as f64 + 0.5)))
        .collect();
    let n = pts.len() as f64;
    let c = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0 / n, a.1 + p.1 / n));
    let (angle, elong) = principal_axis(&pts);
    Group {
        direction: (members.len() >= 2 && elong >= 1.5).then_some(angle),
        members,
        centroid: c,
    }
}

fn collect_groups(uf: &mut UnionFind, glyphs: &[Component]) -> Vec<Group> {
    let mut by_root: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..glyphs.len() {
        by_root.entry(uf.find(i)).or_default().push(i);
    }
    by_root.into_values().map(|m| group_of(m, glyphs)).collect()
}

fn offset_across(g: &Group, p: (f64, f64)) -> Option<f64> {
    let a = g.direction?.to_radians();
    // Unit vector along the screen angle, in image coordinates.
    let (ux, uy) = (a.cos(), -a.sin());
    let (dx, dy) = (p.0 - g.centroid.0, p.1 - g.centroid.1);
    Some((dx * uy - dy * ux).abs())
}

fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(180.0);
    d.min(180.0 - d)
}

/// Find text lines in a chart image. Roles are left unset.
pub fn detect_text_regions(img: &RasterImage, cfg: &DetectConfig) -> Vec<TextRegion> {
    let ink = ink_mask(img, cfg);
    let (glyphs, _) = split_glyphs(connected_components(&ink, Connectivity::Eight), cfg);
    group_glyphs(&glyphs, img.width(), img.height(), cfg)
}

/// Glyph pitch: median centroid distance to the nearest other glyph.
pub fn glyph_pitch(glyphs: &[Component]) -> Option<f64> {
    if glyphs.len() < 2 {
        return None;
    }
    let cs: Vec<(f64, f64)> = glyphs.iter().map(|g| g.centroid()).collect();
    let mut nn: Vec<f64> = cs
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            cs.iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &b)| dist(a, b))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    Some(median(&mut nn))
}

pub fn group_glyphs(glyphs: &[Component], width: usize, height: usize, cfg: &DetectConfig) -> Vec<TextRegion> {
    if glyphs.is_empty() {
        return Vec::new();
    }
    let cs: Vec<(f64, f64)> = glyphs.iter().map(|g| g.centroid()).collect();
    let pitch = glyph_pitch(glyphs).unwrap_or(f64::INFINITY);
    let mut uf = UnionFind::new(glyphs.len());
    for i in 0..glyphs.len() {
        for j in i + 1..glyphs.len() {
            if dist(cs[i], cs[j]) <= cfg.link_factor * pitch {
                uf.union(i, j);
            }
        }
    }

    loop {
        let groups = collect_groups(&mut uf, glyphs);
        let mut merged = false;
        'outer: for a in 0..groups.len() {
            for b in a + 1..groups.len() {
                let (ga, gb) = (&groups[a], &groups[b]);
                let closest = ga
                    .members
                    .iter()
                    .flat_map(|&i| gb.members.iter().map(move |&j| (i, j)))
                    .map(|(i, j)| dist(cs[i], cs[j]))
                    .fold(f64::INFINITY, f64::min);
                if closest > cfg.merge_factor * pitch {
                    continue;
                }
                let (lead, other) = if ga.members.len() >= gb.members.len() { (ga, gb) } else { (gb, ga) };
                if let (Some(da), Some(db)) = (lead.direction, other.direction) {
                    if angle_gap(da, db) > 20.0 {
                        continue;
                    }
                }
                let off = offset_across(lead, other.centroid)
                    .or_else(|| offset_across(other, lead.centroid));
                if off.is_some_and(|o| o > cfg.baseline_factor * pitch) {
                    continue;
                }
                uf.union(ga.members[0], gb.members[0]);
                merged = true;
                break 'outer;
            }
        }
        if !merged {
            break;
        }
    }

    let bounds = BBox::new(0, 0, width as i32, height as i32);
    let mut regions: Vec<TextRegion> = collect_groups(&mut uf, glyphs)
        .into_iter()
        .map(|g| {
            let bbox = g
                .members
                .iter()
                .map(|&i| glyphs[i].bbox)
                .reduce(|a, b| a.union(&b))
                .expect("groups are non-empty")
                .intersect(&bounds)
                .expect("glyphs lie inside the image");
            let mut mask = BinaryImage::filled(bbox.w as usize, bbox.h as usize, false);
            for &i in &g.members {
                for &(x, y) in &glyphs[i].pixels {
                    mask.set((x as i32 - bbox.x) as usize, (y as i32 - bbox.y) as usize, true);
                }
            }
            TextRegion {
                bbox,
                role: None,
                confidence: 0.0,
                text: String::new(),
                rotation_hint: g.direction.unwrap_or(0.0),
                hint_reliable: g.direction.is_some(),
                glyph_count: g.members.len(),
                mask,
                patch_color: None,
            }
        })
        .collect();
    regions.sort_by_key(|r| (r.bbox.y, r.bbox.x));
    regions
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chartgen::{random_spec, render, render_text_crop};
    use crate::types::ChartType;

    #[test]
    fn blank_image_has_no_text() {
        let img = RasterImage::filled(50, 40, Rgb::WHITE);
        assert!(detect_text_regions(&img, &DetectConfig::default()).is_empty());
    }

    #[test]
    fn one_line_with_spaces_is_one_region() {
        let img = render_text_crop("Sales in 2016 (k)", 2, 0, Rgb::BLACK, Rgb::WHITE, 10);
        let r = detect_text_regions(&img, &DetectConfig::default());
        assert_eq!(r.len(), 1, "{:?}", r.iter().map(|r| r.bbox).collect::<Vec<_>>());
        assert!(r[0].rotation_hint.abs() < 1.0);
    }

    #[test]
    fn vertical_label_has_quarter_turn_hint() {
        let img = render_text_crop("Total Sales", 3, 90, Rgb::BLACK, Rgb::WHITE, 10);
        let r = detect_text_regions(&img, &DetectConfig::default());
        assert_eq!(r.len(), 1);
        assert!((r[0].rotation_hint - 90.0).abs() < 3.0, "{}", r[0].rotation_hint);
    }

    #[test]
    fn title_is_found_within_two_pixels() {
        for t in ChartType::ALL {
            let (img, truth) = render(&random_spec(t, 5)).unwrap();
            let title = truth.texts.iter().find(|t| t.role == TextRole::ChartTitle).unwrap().bbox;
            let near = |b: &BBox| {
                (b.x - title.x).abs() <= 2
                    && (b.y - title.y).abs() <= 2
                    && (b.right() - title.right()).abs() <= 2
                    && (b.bottom() - title.bottom()).abs() <= 2
            };
            let hits = detect_text_regions(&img, &DetectConfig::default())
                .into_iter()
                .filter(|r| near(&r.bbox))
                .count();
            assert_eq!(hits, 1, "{t}");
        }
    }

    #[test]
    fn principal_axis_of_a_diagonal() {
        let pts: Vec<(f64, f64)> = (0..20).map(|t| (t as f64, -(t as f64))).collect();
        let (a, e) = principal_axis(&pts);
        assert!((a - 45.0).abs() < 1e-6, "{a}");
        assert!(e > 10.0);
    }
}
