use serde::{Deserialize, Serialize};

use crate::raster::{BinaryImage, RasterImage, Rgb};
use crate::types::{ChartType, TextRole};

use super::{ink_mask, DetectConfig, TextRegion};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RoleConfig {
    /// Regions below this confidence are dropped.
    pub min_confidence: f64,
    /// RGB distance within which a legend patch matches a mark color.
    pub patch_tolerance: f64,
    /// RGB distance within which a pixel counts as background.
    pub background_tolerance: f64,
}

impl Default for RoleConfig {
    fn default() -> Self {
        RoleConfig {
            min_confidence: 0.5,
            patch_tolerance: 30.0,
            background_tolerance: 30.0,
        }
    }
}

const RULE_HIT: f64 = 0.9;
const TITLE_HIT: f64 = 0.95;
const WEAK_TITLE: f64 = 0.6;
const UNEXPLAINED: f64 = 0.3;

/// Median border color.
pub fn estimate_background(img: &RasterImage) -> Rgb {
    Rgb::median_of(&img.border_pixels())
}

/// Axis lines of a bar chart as found from non-text ink.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisFrame {
    /// Column of the category/value axis on the left.
    pub left: i32,
    /// Row of the axis along the bottom.
    pub bottom: i32,
    pub top: i32,
    pub right: i32,
}

impl AxisFrame {
    /// Locate the axes: the column and row holding the most non-text ink,
    /// preferring the left-most column and bottom-most row among near ties.
    pub fn find(structure: &BinaryImage) -> Option<AxisFrame> {
        let (w, h) = (structure.width(), structure.height());
        let mut cols = vec![0usize; w];
        let mut rows = vec![0usize; h];
        for y in 0..h {
            for x in 0..w {
                if structure.get(x, y) {
                    cols[x] += 1;
                    rows[y] += 1;
                }
            }
        }
        let cmax = *cols.iter().max()?;
        let rmax = *rows.iter().max()?;
        if cmax < 10 || rmax < 10 {
            return None;
        }
        let left = cols.iter().position(|&c| c * 10 >= cmax * 9)?;
        let bottom = rows.iter().rposition(|&r| r * 10 >= rmax * 9)?;
        let top = (0..h).find(|&y| structure.get(left, y))?;
        let right = (0..w).rev().find(|&x| structure.get(x, bottom))?;
        Some(AxisFrame {
            left: left as i32,
            bottom: bottom as i32,
            top: top as i32,
            right: right as i32,
        })
    }
}

/// `ink` with the pixels of every text line cleared: axes, spines and ticks.
pub fn structure_ink(ink: &BinaryImage, regions: &[TextRegion]) -> BinaryImage {
    let mut structure = ink.clone();
    for r in regions {
        for y in 0..r.mask.height() {
            for x in 0..r.mask.width() {
                if r.mask.get(x, y) {
                    structure.set(r.bbox.x as usize + x, r.bbox.y as usize + y, false);
                }
            }
        }
    }
    structure
}

fn is_background(p: Rgb, bg: Rgb, cfg: &RoleConfig) -> bool {
    p.distance(&bg) <= cfg.background_tolerance || (p.luma() > 200 && p.chroma() < 20)
}

/// Color of a legend patch immediately left of a horizontal line, if any.
fn legend_patch(img: &RasterImage, r: &TextRegion, bg: Rgb, ink: &BinaryImage, cfg: &RoleConfig) -> Option<Rgb> {
    if !r.is_horizontal() {
        return None;
    }
    let t = r.thickness();
    let (_, cy) = r.center();
    let y = cy as i64;
    let reach = (3.0 * t) as i64;
    let mut x = r.bbox.x as i64 - 1;
    let stop = r.bbox.x as i64 - reach;
    while x >= stop.max(0) {
        let p = img.get(x as usize, y as usize);
        if ink.get(x as usize, y as usize) {
            return None;
        }
        if !is_background(p, bg, cfg) {
            break;
        }
        x -= 1;
    }
    if x < stop.max(0) {
        return None;
    }
    let c = img.get(x as usize, y as usize);
    let same = |xx: i64, yy: i64| {
        img.get_checked(xx, yy)
            .is_some_and(|q| q.distance(&c) <= cfg.patch_tolerance)
    };
    let mut x0 = x;
    while same(x0 - 1, y) {
        x0 -= 1;
    }
    let pw = (x - x0 + 1) as f64;
    let mid = (x0 + x) / 2;
    let (mut y0, mut y1) = (y, y);
    while same(mid, y0 - 1) {
        y0 -= 1;
    }
    while same(mid, y1 + 1) {
        y1 += 1;
    }
    let ph = (y1 - y0 + 1) as f64;
    let squareish = pw >= 0.4 * t && pw <= 2.0 * t && ph >= 0.4 * t && ph <= 2.0 * t;
    if !squareish || (pw / ph - 1.0).abs() > 0.6 {
        return None;
    }
    // The patch color must also be used by a mark elsewhere.
    let area = pw * ph;
    let mut matches = 0.0;
    for yy in (0..img.height()).step_by(2) {
        for xx in (0..img.width()).step_by(2) {
            if img.get(xx, yy).distance(&c) <= cfg.patch_tolerance {
                matches += 4.0;
            }
        }
    }
    (matches >= 1.5 * area).then_some(c)
}

fn set(r: &mut TextRegion, role: TextRole, confidence: f64) {
    r.role = Some(role);
    r.confidence = confidence;
}

/// Give every region a role by layout rules and drop those whose
/// confidence is below the cutoff or whose role cannot occur on
/// `chart_type`.
pub fn assign_roles(
    mut regions: Vec<TextRegion>,
    chart_type: ChartType,
    img: &RasterImage,
    detect: &DetectConfig,
    cfg: &RoleConfig,
) -> Vec<TextRegion> {
    if regions.is_empty() {
        return regions;
    }
    for r in regions.iter_mut() {
        r.role = None;
        r.confidence = UNEXPLAINED;
        r.patch_color = None;
    }
    let bg = estimate_background(img);
    let ink = ink_mask(img, detect);

    let patches: Vec<Option<Rgb>> = regions.iter().map(|r| legend_patch(img, r, bg, &ink, cfg)).collect();
    let legend_count = patches.iter().filter(|p| p.is_some()).count();
    if legend_count >= 2 {
        for (r, p) in regions.iter_mut().zip(&patches) {
            if p.is_some() {
                set(r, TextRole::Legend, RULE_HIT);
                r.patch_color = *p;
            }
        }
    }

    let frame = if chart_type.is_bar() {
        AxisFrame::find(&structure_ink(&ink, &regions))
    } else {
        None
    };

    // Title: the top-most free horizontal line above the plot.
    let free = |r: &TextRegion| r.role.is_none();
    let title = regions
        .iter()
        .enumerate()
        .filter(|(_, r)| free(r) && r.is_horizontal() && r.glyph_count >= 2)
        .filter(|(_, r)| frame.is_none_or(|f| r.bbox.bottom() <= f.top))
        .min_by_key(|(_, r)| (r.bbox.y, r.bbox.x))
        .map(|(i, _)| i);
    if let Some(i) = title {
        let bottom = regions[i].bbox.bottom();
        let clear = regions
            .iter()
            .enumerate()
            .all(|(j, r)| j == i || r.role == Some(TextRole::Legend) || r.bbox.y >= bottom);
        set(&mut regions[i], TextRole::ChartTitle, if clear { TITLE_HIT } else { WEAK_TITLE });
    }

    match frame {
        Some(f) => bar_roles(&mut regions, f),
        None if chart_type == ChartType::Pie => {
            for r in regions.iter_mut().filter(|r| r.role.is_none()) {
                set(r, TextRole::PieLabel, RULE_HIT);
            }
        }
        None => {}
    }

    regions.retain(|r| {
        r.confidence >= cfg.min_confidence && r.role.is_some_and(|role| role.allowed_on(chart_type))
    });
    regions
}

fn bar_roles(regions: &mut [TextRegion], f: AxisFrame) {
    let slack = |r: &TextRegion| r.thickness() as i32;
    let left: Vec<usize> = (0..regions.len())
        .filter(|&i| {
            let r = &regions[i];
            let (_, cy) = r.center();
            r.role.is_none()
                && r.bbox.right() <= f.left + 1
                && cy >= (f.top - slack(r)) as f64
                && cy <= (f.bottom + slack(r)) as f64
        })
        .collect();
    let y_label = left
        .iter()
        .copied()
        .filter(|&i| regions[i].is_vertical() && regions[i].glyph_count >= 2)
        .min_by_key(|&i| regions[i].bbox.x);
    for &i in &left {
        if Some(i) == y_label {
            set(&mut regions[i], TextRole::YLabel, RULE_HIT);
        } else {
            set(&mut regions[i], TextRole::YValue, RULE_HIT);
        }
    }

    let below: Vec<usize> = (0..regions.len())
        .filter(|&i| regions[i].role.is_none() && regions[i].bbox.y >= f.bottom - 1)
        .collect();
    let lowest = below
        .iter()
        .copied()
        .filter(|&i| regions[i].is_horizontal() && regions[i].glyph_count >= 2)
        .max_by_key(|&i| regions[i].bbox.y);
    let x_label = lowest.filter(|&i| {
        below.len() >= 2
            && below
                .iter()
                .all(|&j| j == i || regions[j].bbox.bottom() <= regions[i].bbox.y)
    });
    for &i in &below {
        if Some(i) == x_label {
            set(&mut regions[i], TextRole::XLabel, RULE_HIT);
        } else {
            set(&mut regions[i], TextRole::XValue, RULE_HIT);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chartgen::{random_spec, render};
    use crate::textdetect::detect_text_regions;

    fn roles_for(t: ChartType, seed: u64) -> (Vec<TextRegion>, crate::chartgen::GroundTruth) {
        let (img, truth) = render(&random_spec(t, seed)).unwrap();
        let d = DetectConfig::default();
        let regions = assign_roles(detect_text_regions(&img, &d), t, &img, &d, &RoleConfig::default());
        (regions, truth)
    }

    #[test]
    fn stacked_roles_match_truth() {
        for seed in 0..5 {
            let (regions, truth) = roles_for(ChartType::StackedVBar, seed);
            for r in &regions {
                let t = truth
                    .texts
                    .iter()
                    .max_by(|a, b| a.bbox.iou(&r.bbox).partial_cmp(&b.bbox.iou(&r.bbox)).unwrap())
                    .unwrap();
                assert!(t.bbox.iou(&r.bbox) > 0.5, "seed {seed}: {:?}", r.bbox);
                assert_eq!(r.role, Some(t.role), "seed {seed}: {:?} {:?}", t.string, r.bbox);
            }
        }
    }

    #[test]
    fn pie_legend_is_detected() {
        let seed = (0..200)
            .find(|&s| random_spec(ChartType::Pie, s).aesthetics.legend.is_some())
            .unwrap();
        let (regions, _) = roles_for(ChartType::Pie, seed);
        assert!(regions.iter().any(|r| r.role == Some(TextRole::Legend)));
    }

    #[test]
    fn kept_regions_meet_the_cutoff() {
        for t in ChartType::ALL {
            let (regions, _) = roles_for(t, 9);
            assert!(regions.iter().all(|r| r.confidence >= 0.5));
            assert!(regions.iter().all(|r| r.role.unwrap().allowed_on(t)));
        }
    }

    #[test]
    fn low_confidence_region_is_dropped() {
        let (img, _) = render(&random_spec(ChartType::VBar, 1)).unwrap();
        let d = DetectConfig::default();
        let mut regions = detect_text_regions(&img, &d);
        // A stray line far right of the plot matches no rule.
        let mut stray = regions[0].clone();
        stray.bbox.x = img.width() as i32 - stray.bbox.w - 1;
        stray.bbox.y = img.height() as i32 / 2;
        regions.push(stray.clone());
        let out = assign_roles(regions, ChartType::VBar, &img, &d, &RoleConfig::default());
        assert!(!out.iter().any(|r| r.bbox == stray.bbox));
    }
}
