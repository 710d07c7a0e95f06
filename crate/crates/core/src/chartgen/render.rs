use crate::error::Result;
use crate::raster::{BBox, BinaryImage, RasterImage, Rgb};
use crate::types::ChartType;

use super::layout::{layout, text_ink};
use super::truth::{GroundTruth, TruthMark, TruthText, Wedge};
use super::ChartSpec;

fn fill(img: &mut RasterImage, r: &BBox, color: Rgb) {
    let Some(r) = r.intersect(&img.bounds()) else { return };
    for y in r.y..r.bottom() {
        for x in r.x..r.right() {
            img.set(x as usize, y as usize, color);
        }
    }
}

fn stamp(img: &mut RasterImage, ink: &BinaryImage, at: &BBox, color: Rgb) {
    for y in 0..ink.height() {
        for x in 0..ink.width() {
            if ink.get(x, y) {
                let (px, py) = (at.x + x as i32, at.y + y as i32);
                if px >= 0 && py >= 0 && (px as usize) < img.width() && (py as usize) < img.height() {
                    img.set(px as usize, py as usize, color);
                }
            }
        }
    }
}

/// Clockwise angle in degrees from 12 o'clock of `(x, y)` around `c`.
pub(crate) fn clock_angle(c: (f64, f64), x: f64, y: f64) -> f64 {
    let a = (x - c.0).atan2(-(y - c.1)).to_degrees();
    if a < 0.0 {
        a + 360.0
    } else {
        a
    }
}

/// Draw the chart and report exact ground truth for it.
pub fn render(spec: &ChartSpec) -> Result<(RasterImage, GroundTruth)> {
    let l = layout(spec)?;
    let a = &spec.aesthetics;
    let mut img = RasterImage::filled(l.width, l.height, a.background);

    if spec.chart_type.is_bar() {
        fill(&mut img, &l.plot, a.plot_background);
    }
    for g in &l.grid_lines {
        fill(&mut img, g, a.grid_color);
    }
    for b in &l.bars {
        fill(&mut img, &b.bbox, a.colors[b.series]);
    }
    for s in &l.strokes {
        fill(&mut img, s, a.text_color);
    }
    for (b, c) in &l.legend_patches {
        fill(&mut img, b, *c);
    }
    if let Some(p) = &l.pie {
        let r = p.radius;
        let (cx, cy) = p.center;
        let y0 = (cy - r).floor().max(0.0) as usize;
        let y1 = ((cy + r).ceil() as usize).min(l.height);
        let x0 = (cx - r).floor().max(0.0) as usize;
        let x1 = ((cx + r).ceil() as usize).min(l.width);
        for y in y0..y1 {
            for x in x0..x1 {
                let (px, py) = (x as f64 + 0.5, y as f64 + 0.5);
                if (px - cx).hypot(py - cy) > r {
                    continue;
                }
                let ang = clock_angle(p.center, px, py);
                let i = p
                    .wedges
                    .iter()
                    .position(|&(s, e)| ang >= s && ang < e)
                    .unwrap_or(p.wedges.len() - 1);
                img.set(x, y, a.colors[i]);
            }
        }
    }
    for t in &l.texts {
        stamp(&mut img, &t.ink, &t.bbox, a.text_color);
    }

    let texts = l
        .texts
        .iter()
        .map(|t| TruthText {
            string: t.string.clone(),
            role: t.role,
            bbox: t.bbox,
            rotation: t.rotation as f64,
        })
        .collect();

    let marks = match &l.pie {
        Some(p) => {
            let total: f64 = spec.values.iter().map(|r| r[0]).sum();
            spec.categories
                .iter()
                .zip(&p.wedges)
                .zip(&spec.values)
                .map(|((c, &(s, e)), v)| TruthMark {
                    category: c.clone(),
                    series: None,
                    value: v[0] / total * 100.0,
                    bbox: None,
                    wedge: Some(Wedge {
                        start_deg: s,
                        end_deg: e,
                    }),
                })
                .collect()
        }
        None => l
            .bars
            .iter()
            .map(|b| TruthMark {
                category: spec.categories[b.category].clone(),
                series: spec.chart_type.is_stacked().then(|| spec.series[b.series].clone()),
                value: spec.values[b.category][b.series],
                bbox: Some(b.bbox),
                wedge: None,
            })
            .collect(),
    };

    let truth = GroundTruth {
        chart_type: spec.chart_type,
        title: spec.title.clone(),
        x_label: spec.x_label.clone(),
        y_label: spec.y_label.clone(),
        texts,
        marks,
        pie_circle: l.pie.as_ref().map(|p| [p.center.0, p.center.1, p.radius]),
        spec: Some(spec.clone()),
    };
    Ok((img, truth))
}

/// A standalone crop of `text` as the renderer draws it: ink at `scale`,
/// rotated by `rotation` degrees, padded by `pad` background pixels.
pub fn render_text_crop(
    text: &str,
    scale: usize,
    rotation: u32,
    fg: Rgb,
    bg: Rgb,
    pad: usize,
) -> RasterImage {
    let ink = text_ink(text, scale, rotation);
    let mut img = RasterImage::filled(ink.width() + 2 * pad, ink.height() + 2 * pad, bg);
    let at = BBox::new(pad as i32, pad as i32, ink.width() as i32, ink.height() as i32);
    stamp(&mut img, &ink, &at, fg);
    img
}

impl GroundTruth {
    pub fn is_pie(&self) -> bool {
        self.chart_type == ChartType::Pie
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chartgen::{random_spec, AestheticSpec};
    use crate::types::TextRole;

    fn simple_vbar(values: &[f64]) -> ChartSpec {
        let mut spec = random_spec(ChartType::VBar, 3);
        spec.categories = (0..values.len()).map(|i| format!("C{i}")).collect();
        spec.values = values.iter().map(|&v| vec![v]).collect();
        spec.aesthetics = AestheticSpec {
            tick_step: 10,
            tick_count: 3,
            pixels_per_unit: 10,
            tick_rotation: 0,
            category_pitch: 80,
            font_scale: 2,
            label_gap: 40,
            ..spec.aesthetics
        };
        spec
    }

    #[test]
    fn vbar_heights_are_proportional() {
        let (img, truth) = render(&simple_vbar(&[10.0, 20.0])).unwrap();
        let color = random_spec(ChartType::VBar, 3).aesthetics.colors[0];
        let mut heights = Vec::new();
        for m in &truth.marks {
            let b = m.bbox.unwrap();
            let cx = (b.x + b.w / 2) as usize;
            let h = (0..img.height()).filter(|&y| img.get(cx, y) == color).count();
            heights.push(h as i32);
        }
        assert!((heights[1] - 2 * heights[0]).abs() <= 1, "{heights:?}");
    }

    #[test]
    fn two_equal_pie_wedges() {
        let mut spec = random_spec(ChartType::Pie, 4);
        spec.categories = vec!["Alpha".into(), "Beta".into()];
        spec.values = vec![vec![1.0], vec![1.0]];
        let (_, truth) = render(&spec).unwrap();
        let w: Vec<_> = truth.marks.iter().map(|m| m.wedge.unwrap()).collect();
        assert_eq!(w.len(), 2);
        assert!((w[0].end_deg - w[0].start_deg - 180.0).abs() < 1e-9);
        assert!((w[1].end_deg - w[1].start_deg - 180.0).abs() < 1e-9);
    }

    #[test]
    fn render_is_deterministic() {
        let spec = random_spec(ChartType::StackedHBar, 11);
        let (a, ta) = render(&spec).unwrap();
        let (b, tb) = render(&spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(ta, tb);
    }

    #[test]
    fn truth_boxes_are_tight_to_text_ink() {
        for t in ChartType::ALL {
            let spec = random_spec(t, 21);
            let (img, truth) = render(&spec).unwrap();
            let ink = spec.aesthetics.text_color;
            for item in &truth.texts {
                let b = item.bbox;
                let inked = |x: i32, y: i32| img.get(x as usize, y as usize) == ink;
                assert!((b.x..b.right()).any(|x| inked(x, b.y)), "{item:?}");
                assert!((b.x..b.right()).any(|x| inked(x, b.bottom() - 1)), "{item:?}");
                assert!((b.y..b.bottom()).any(|y| inked(b.x, y)), "{item:?}");
                assert!((b.y..b.bottom()).any(|y| inked(b.right() - 1, y)), "{item:?}");
            }
        }
    }

    #[test]
    fn role_presence_follows_chart_type() {
        for seed in 0..10 {
            for t in ChartType::ALL {
                let (_, truth) = render(&random_spec(t, seed)).unwrap();
                assert!(truth.texts.iter().all(|x| x.role.allowed_on(t)));
                let titles = truth.texts.iter().filter(|x| x.role == TextRole::ChartTitle).count();
                assert_eq!(titles, 1);
                if t.is_stacked() {
                    assert!(truth.texts.iter().any(|x| x.role == TextRole::Legend));
                }
            }
        }
    }

    #[test]
    fn wedges_partition_the_circle() {
        for seed in 0..20 {
            let (_, truth) = render(&random_spec(ChartType::Pie, seed)).unwrap();
            let total: f64 = truth.marks.iter().map(|m| {
                let w = m.wedge.unwrap();
                w.end_deg - w.start_deg
            }).sum();
            assert!((total - 360.0).abs() < 1e-9);
        }
    }

    #[test]
    fn stacked_segments_match_shares() {
        for seed in 0..10 {
            let spec = random_spec(ChartType::StackedVBar, seed);
            let (_, truth) = render(&spec).unwrap();
            for cat in &spec.categories {
                let segs: Vec<&TruthMark> = truth.marks.iter().filter(|m| &m.category == cat).collect();
                let total_px: i32 = segs.iter().map(|m| m.bbox.unwrap().h).sum();
                let total_v: f64 = segs.iter().map(|m| m.value).sum();
                for m in segs {
                    let expect = m.value / total_v * total_px as f64;
                    assert!((m.bbox.unwrap().h as f64 - expect).abs() <= 2.0);
                }
            }
        }
    }
}
