use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{canny, ransac_circle, to_grayscale, BBox, BinaryImage, Circle, RasterImage, Rgb};

use super::ExtractConfig;

/// Circles smaller than this are not taken for a pie.
const MIN_PIE_RADIUS: f64 = 20.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PieWedge {
    /// Clockwise degrees from 12 o'clock. `end_deg` may exceed 360 for the
    /// wedge that spans the top.
    pub start_deg: f64,
    pub end_deg: f64,
    /// Percent of the whole pie.
    pub share: f64,
    pub color: Rgb,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl PieWedge {
    pub fn sweep(&self) -> f64 {
        self.end_deg - self.start_deg
    }

    pub fn bisector(&self) -> f64 {
        ((self.start_deg + self.end_deg) / 2.0).rem_euclid(360.0)
    }
}

fn edge_mask(img: &RasterImage, text_boxes: &[BBox], cfg: &ExtractConfig) -> Result<BinaryImage> {
    let mut edges = canny(&to_grayscale(img), cfg.canny_low, cfg.canny_high)?;
    for t in text_boxes {
        let Some(b) = t.inflate(2).intersect(&edges.bounds()) else { continue };
        for y in b.y..b.bottom() {
            for x in b.x..b.right() {
                edges.set(x as usize, y as usize, false);
            }
        }
    }
    Ok(edges)
}

/// Fraction of the circle's circumference that lies within `tol` pixels of
/// an edge pixel.
pub fn circle_support(circle: &Circle, edges: &BinaryImage, tol: f64) -> f64 {
    const STEPS: usize = 360;
    let (cx, cy) = circle.center;
    let reach = tol.ceil() as i64;
    let hit = (0..STEPS)
        .filter(|&k| {
            let a = (k as f64) * std::f64::consts::TAU / STEPS as f64;
            let (px, py) = (cx + circle.radius * a.sin(), cy - circle.radius * a.cos());
            let (ix, iy) = (px.floor() as i64, py.floor() as i64);
            (iy - reach..=iy + reach).any(|y| {
                (ix - reach..=ix + reach).any(|x| {
                    edges.get_checked(x, y).unwrap_or(false)
                        && (x as f64 + 0.5 - px).hypot(y as f64 + 0.5 - py) <= tol + 0.5
                })
            })
        })
        .count();
    hit as f64 / STEPS as f64
}

/// Fit the pie outline: Canny edges outside text, then a RANSAC circle.
/// Returns the circle and its circumference support.
pub fn find_pie_circle(img: &RasterImage, text_boxes: &[BBox], cfg: &ExtractConfig) -> Result<(Circle, f64)> {
    let edges = edge_mask(img, text_boxes, cfg)?;
    let points: Vec<(f64, f64)> = edges
        .foreground_points()
        .into_iter()
        .map(|(x, y)| (x as f64 + 0.5, y as f64 + 0.5))
        .collect();
    let circle = ransac_circle(&points, cfg.ransac_iterations, cfg.ransac_tolerance, cfg.ransac_seed)
        .map_err(|e| Error::FitFailure(e.to_string()))?;
    let support = if circle.radius >= MIN_PIE_RADIUS {
        circle_support(&circle, &edges, cfg.ransac_tolerance)
    } else {
        0.0
    };
    Ok((circle, support))
}

/// Split a pie into wedges by walking a small concentric circle and cutting
/// wherever neighboring samples change color. Wedges come out clockwise
/// starting from the one at 12 o'clock.
pub fn extract_pie(img: &RasterImage, circle: &Circle, cfg: &ExtractConfig) -> Result<Vec<PieWedge>> {
    let n = cfg.pie_samples;
    if n < 3 || !(circle.radius > 0.0) {
        return Err(Error::ExtractionFailure("no usable pie circle".into()));
    }
    let step = 360.0 / n as f64;
    let r = circle.radius * cfg.pie_sample_radius;
    let (cx, cy) = circle.center;
    let samples: Vec<Rgb> = (0..n)
        .map(|k| {
            let a = (k as f64 * step).to_radians();
            let (x, y) = (cx + r * a.sin(), cy - r * a.cos());
            img.get_checked(x.floor() as i64, y.floor() as i64)
        })
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::ExtractionFailure("pie sampling circle leaves the image".into()))?;

    let jumps: Vec<usize> = (0..n)
        .filter(|&k| samples[k].distance(&samples[(k + 1) % n]) > cfg.color_jump)
        .collect();
    if jumps.is_empty() {
        return Ok(vec![PieWedge {
            start_deg: 0.0,
            end_deg: 360.0,
            share: 100.0,
            color: Rgb::median_of(&samples),
            label: None,
        }]);
    }
    let mut groups: Vec<(usize, usize)> = Vec::new();
    for j in jumps {
        match groups.last_mut() {
            Some(g) if j - g.1 <= cfg.transition_width => g.1 = j,
            _ => groups.push((j, j)),
        }
    }
    if groups.len() > 1 {
        let (first, last) = (groups[0], groups[groups.len() - 1]);
        if first.0 + n - last.1 <= cfg.transition_width {
            groups.pop();
            groups[0] = (last.0, first.1 + n);
        }
    }
    let mut cuts: Vec<f64> = groups
        .iter()
        .map(|&(a, b)| (((a + b) as f64 / 2.0 + 0.5) * step).rem_euclid(360.0))
        .collect();
    cuts.sort_by(f64::total_cmp);
    let top = (0..cuts.len())
        .min_by(|&i, &j| {
            let d = |c: f64| c.min(360.0 - c);
            d(cuts[i]).total_cmp(&d(cuts[j]))
        })
        .unwrap_or(0);
    cuts.rotate_left(top);

    let m = cuts.len();
    let spans: Vec<(f64, f64)> = (0..m)
        .map(|i| {
            let start = cuts[i];
            let mut end = if i + 1 < m { cuts[i + 1] } else { cuts[0] };
            while end <= start {
                end += 360.0;
            }
            (start, end)
        })
        .collect();
    let colors: Vec<Rgb> = spans
        .iter()
        .map(|&(start, end)| {
            let inside: Vec<Rgb> = (0..n)
                .filter(|&k| {
                    let a = k as f64 * step;
                    let a = if a < start { a + 360.0 } else { a };
                    a > start + step && a < end - step
                })
                .map(|k| samples[k])
                .collect();
            if inside.is_empty() {
                samples[(((start + end) / 2.0 / step).round() as usize) % n]
            } else {
                Rgb::median_of(&inside)
            }
        })
        .collect();

    if m > 1 && cfg.pie_refine {
        for i in 0..m {
            let prev = (i + m - 1) % m;
            let room = spans[prev].1 - spans[prev].0;
            let room = room.min(spans[i].1 - spans[i].0) / 2.0;
            if let Some(a) = refine_cut(img, circle, cuts[i], room, colors[prev], colors[i], cfg) {
                cuts[i] = a;
            }
        }
    }

    let mut wedges = Vec::with_capacity(m);
    for i in 0..m {
        let start = cuts[i];
        let mut end = if i + 1 < m { cuts[i + 1] } else { cuts[0] };
        while end <= start {
            end += 360.0;
        }
        wedges.push(PieWedge {
            start_deg: start,
            end_deg: end,
            share: (end - start) / 3.6,
            color: colors[i],
            label: None,
        });
    }
    Ok(wedges)
}

/// Sharpen a boundary between two wedges: on concentric arcs across the
/// outer part of the disk, find where the color turns from `before` to
/// `after`, then fit a straight line through those points. The line's
/// direction does not depend on the fitted center.
fn refine_cut(
    img: &RasterImage,
    circle: &Circle,
    cut: f64,
    room: f64,
    before: Rgb,
    after: Rgb,
    cfg: &ExtractConfig,
) -> Option<f64> {
    let (cx, cy) = circle.center;
    let r = circle.radius;
    let at = |rho: f64, deg: f64| {
        let a = deg.to_radians();
        img.get_checked((cx + rho * a.sin()).floor() as i64, (cy - rho * a.cos()).floor() as i64)
    };
    let mut points = Vec::new();
    let mut rho = cfg.pie_refine_radii.0 * r;
    while rho <= cfg.pie_refine_radii.1 * r {
        let dstep = (0.25 / rho).to_degrees();
        let reach = room.min(3.0 + (3.0 / rho).to_degrees());
        let mut last_before = None;
        let mut k = -(reach / dstep).floor();
        while k * dstep <= reach {
            let deg = cut + k * dstep;
            let p = at(rho, deg)?;
            let is_after = p.distance(&after) < p.distance(&before);
            if !is_after {
                last_before = Some(deg);
            } else if let Some(b) = last_before {
                let mid = ((b + deg) / 2.0).to_radians();
                points.push((cx + rho * mid.sin(), cy - rho * mid.cos()));
                break;
            }
            k += 1.0;
        }
        rho += 1.0;
    }
    if points.len() < 5 {
        return None;
    }
    let n = points.len() as f64;
    let (mx, my) = points.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0 / n, a.1 + p.1 / n));
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for &(x, y) in &points {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    let theta = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    let (mut dx, mut dy) = (theta.cos(), theta.sin());
    if dx * (mx - cx) + dy * (my - cy) < 0.0 {
        dx = -dx;
        dy = -dy;
    }
    let refined = dx.atan2(-dy).to_degrees().rem_euclid(360.0);
    let shift = (refined - cut + 180.0).rem_euclid(360.0) - 180.0;
    (shift.abs() <= room).then_some(refined)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chartgen::{random_spec, render};
    use crate::types::ChartType;

    fn pie_chart(values: &[f64]) -> (RasterImage, crate::chartgen::GroundTruth) {
        let mut spec = random_spec(ChartType::Pie, 4);
        spec.categories = (0..values.len()).map(|i| format!("P{i}")).collect();
        spec.title = "Pie".into();
        spec.aesthetics.pie_radius = 150;
        spec.values = values.iter().map(|&v| vec![v]).collect();
        spec.aesthetics.legend = None;
        spec.aesthetics.colors = crate::chartgen::PALETTE[..values.len()].to_vec();
        render(&spec).unwrap()
    }

    fn disk(color: Rgb) -> (RasterImage, Circle) {
        let img = RasterImage::from_fn(200, 200, |x, y| {
            if (x as f64 + 0.5 - 100.0).hypot(y as f64 + 0.5 - 100.0) <= 70.0 {
                color
            } else {
                Rgb::WHITE
            }
        });
        (img, Circle { center: (100.0, 100.0), radius: 70.0, inlier_ratio: 1.0 })
    }

    #[test]
    fn pie_circle_is_recovered() {
        let (img, truth) = pie_chart(&[3.0, 2.0, 5.0]);
        let (c, support) = find_pie_circle(&img, &truth.texts.iter().map(|t| t.bbox).collect::<Vec<_>>(), &ExtractConfig::default()).unwrap();
        let [x, y, r] = truth.pie_circle.unwrap();
        assert!((c.center.0 - x).abs() <= 1.0 && (c.center.1 - y).abs() <= 1.0, "{c:?} vs {x} {y}");
        assert!((c.radius - r).abs() <= 1.5);
        assert!(support >= 0.8, "{support}");
    }

    #[test]
    fn halves_are_fifty_fifty() {
        let (img, truth) = pie_chart(&[1.0, 1.0]);
        let [x, y, r] = truth.pie_circle.unwrap();
        let c = Circle { center: (x, y), radius: r, inlier_ratio: 1.0 };
        let w = extract_pie(&img, &c, &ExtractConfig::default()).unwrap();
        assert_eq!(w.len(), 2);
        for wedge in &w {
            assert!((wedge.share - 50.0).abs() <= 1.0, "{w:?}");
        }
    }

    #[test]
    fn uniform_disk_is_one_wedge() {
        let (img, c) = disk(Rgb::new(31, 119, 180));
        let w = extract_pie(&img, &c, &ExtractConfig::default()).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].share, 100.0);
    }

    #[test]
    fn shares_follow_the_values() {
        let values = [32.0, 27.0, 18.0, 13.0, 11.0];
        let (img, truth) = pie_chart(&values);
        let cfg = ExtractConfig::default();
        let boxes: Vec<BBox> = truth.texts.iter().map(|t| t.bbox).collect();
        let (c, _) = find_pie_circle(&img, &boxes, &cfg).unwrap();
        let w = extract_pie(&img, &c, &cfg).unwrap();
        assert_eq!(w.len(), 5);
        for (wedge, v) in w.iter().zip(values) {
            assert!((wedge.share - v).abs() <= 2.0, "{} vs {v}", wedge.share);
        }
        let total: f64 = w.iter().map(|x| x.share).sum();
        assert!((total - 100.0).abs() < 1e-9);
    }

    #[test]
    fn blank_image_support_is_low() {
        let img = RasterImage::filled(120, 90, Rgb::WHITE);
        assert!(find_pie_circle(&img, &[], &ExtractConfig::default()).is_err());
    }
}
