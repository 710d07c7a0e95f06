use crate::raster::{Circle, Rgb};
use crate::textdetect::TextRegion;
use crate::types::{ChartType, TextRole};

use super::{BarMark, ChartData, DataMark, ExtractConfig, PieWedge, StackSegment};

/// Marks found on a chart, before labelling.
#[derive(Debug, Clone, PartialEq)]
pub enum Marks {
    Bars(Vec<BarMark>),
    Stacks(Vec<BarMark>, Vec<StackSegment>),
    Pie(Circle, Vec<PieWedge>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Association {
    pub data: ChartData,
    pub warnings: Vec<String>,
}

/// Pair items with targets by ascending cost, each used at most once.
/// Pairs costing more than `limit` are never made.
fn greedy_match(costs: &[Vec<f64>], limit: f64) -> Vec<Option<usize>> {
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (i, row) in costs.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            if c <= limit {
                pairs.push((c, i, j));
            }
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut out = vec![None; costs.len()];
    let mut taken = vec![false; costs.first().map_or(0, |r| r.len())];
    for (_, i, j) in pairs {
        if out[i].is_none() && !taken[j] {
            out[i] = Some(j);
            taken[j] = true;
        }
    }
    out
}

fn text_of(regions: &[TextRegion], role: TextRole) -> Option<String> {
    regions.iter().find(|r| r.role == Some(role)).map(|r| r.text.clone())
}

fn legend_entries(regions: &[TextRegion]) -> Vec<(String, Rgb)> {
    regions
        .iter()
        .filter(|r| r.role == Some(TextRole::Legend))
        .filter_map(|r| r.patch_color.map(|c| (r.text.clone(), c)))
        .collect()
}

struct Namer<'a> {
    next: usize,
    warnings: &'a mut Vec<String>,
}

impl Namer<'_> {
    fn placeholder(&mut self, what: &str) -> String {
        self.next += 1;
        let name = format!("unlabeled-{}", self.next);
        self.warnings.push(format!("{what} has no label; recorded as {name}"));
        name
    }
}

fn nearest_color(c: Rgb, entries: &[(String, Rgb)], limit: f64) -> Option<&str> {
    entries
        .iter()
        .map(|(s, e)| (s, c.distance(e)))
        .filter(|(_, d)| *d < limit)
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(s, _)| s.as_str())
}

/// Attach category, series and wedge labels to extracted marks. A mark with
/// no label is kept under an `unlabeled-N` placeholder and a warning.
pub fn associate(chart_type: ChartType, marks: &Marks, regions: &[TextRegion], cfg: &ExtractConfig) -> Association {
    let mut warnings = Vec::new();
    let mut data = ChartData::empty(chart_type);
    data.title = text_of(regions, TextRole::ChartTitle);
    if chart_type.is_bar() {
        data.x_label = text_of(regions, TextRole::XLabel);
        data.y_label = text_of(regions, TextRole::YLabel);
    }
    let mut namer = Namer { next: 0, warnings: &mut warnings };

    match marks {
        Marks::Bars(bars) | Marks::Stacks(bars, _) => {
            let vertical = bars.first().is_none_or(|b| b.base.grows_vertically());
            let role = if vertical { TextRole::XValue } else { TextRole::YValue };
            let labels: Vec<&TextRegion> = regions.iter().filter(|r| r.role == Some(role)).collect();
            let costs: Vec<Vec<f64>> = bars
                .iter()
                .map(|b| {
                    labels
                        .iter()
                        .map(|l| {
                            let (x, y) = l.center();
                            (if vertical { x } else { y } - b.cross_center()).abs()
                        })
                        .collect()
                })
                .collect();
            let half_width = |b: &BarMark| if vertical { b.bbox.w } else { b.bbox.h } as f64 / 2.0;
            let limit = bars.iter().map(half_width).fold(0.0, f64::max);
            let matched = greedy_match(&costs, limit);
            let categories: Vec<String> = matched
                .iter()
                .map(|m| match m {
                    Some(j) => labels[*j].text.clone(),
                    None => namer.placeholder("bar"),
                })
                .collect();

            match marks {
                Marks::Stacks(_, segments) => {
                    let legend = legend_entries(regions);
                    data.series = legend.iter().map(|(s, _)| s.clone()).collect();
                    for seg in segments {
                        let series = match nearest_color(seg.color, &legend, cfg.series_match) {
                            Some(s) => s.to_string(),
                            None => {
                                let s = namer.placeholder("stack segment");
                                data.series.push(s.clone());
                                s
                            }
                        };
                        data.marks.push(DataMark {
                            category: categories[seg.bar].clone(),
                            series: Some(series),
                            value: seg.value,
                            bbox: None,
                            wedge: None,
                        });
                    }
                }
                _ => {
                    for (b, c) in bars.iter().zip(&categories) {
                        data.marks.push(DataMark {
                            category: c.clone(),
                            series: None,
                            value: b.value,
                            bbox: Some(b.bbox),
                            wedge: None,
                        });
                    }
                }
            }
            data.categories = categories;
        }
        Marks::Pie(circle, wedges) => {
            let legend = legend_entries(regions);
            let names: Vec<Option<String>> = if !legend.is_empty() {
                wedges
                    .iter()
                    .map(|w| nearest_color(w.color, &legend, cfg.series_match).map(str::to_string))
                    .collect()
            } else {
                let labels: Vec<&TextRegion> =
                    regions.iter().filter(|r| r.role == Some(TextRole::PieLabel)).collect();
                let (cx, cy) = circle.center;
                let costs: Vec<Vec<f64>> = wedges
                    .iter()
                    .map(|w| {
                        labels
                            .iter()
                            .map(|l| {
                                let (x, y) = l.center();
                                let a = (x - cx).atan2(-(y - cy)).to_degrees().rem_euclid(360.0);
                                let d = (a - w.bisector()).rem_euclid(360.0);
                                d.min(360.0 - d)
                            })
                            .collect()
                    })
                    .collect();
                greedy_match(&costs, 180.0)
                    .into_iter()
                    .map(|m| m.map(|j| labels[j].text.clone()))
                    .collect()
            };
            for (w, name) in wedges.iter().zip(names) {
                let category = name.unwrap_or_else(|| namer.placeholder("pie wedge"));
                data.categories.push(category.clone());
                data.marks.push(DataMark {
                    category,
                    series: None,
                    value: Some(w.share),
                    bbox: None,
                    wedge: Some((w.start_deg, w.end_deg)),
                });
            }
        }
    }
    Association { data, warnings }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::{BBox, BinaryImage};
    use crate::extract::Side;

    fn region(text: &str, role: TextRole, bbox: BBox) -> TextRegion {
        TextRegion {
            bbox,
            role: Some(role),
            confidence: 0.9,
            text: text.into(),
            rotation_hint: 0.0,
            hint_reliable: true,
            glyph_count: text.len(),
            mask: BinaryImage::filled(1, 1, false),
            patch_color: None,
        }
    }

    fn wedge(start: f64, end: f64, color: Rgb) -> PieWedge {
        PieWedge { start_deg: start, end_deg: end, share: (end - start) / 3.6, color, label: None }
    }

    #[test]
    fn pie_wedge_without_a_label_gets_a_placeholder() {
        let circle = Circle { center: (100.0, 100.0), radius: 50.0, inlier_ratio: 1.0 };
        let wedges = vec![wedge(0.0, 180.0, Rgb::new(1, 2, 3)), wedge(180.0, 360.0, Rgb::new(200, 2, 3))];
        // Only the right-hand wedge has a label beside it.
        let regions = vec![region("East", TextRole::PieLabel, BBox::new(160, 95, 30, 10))];
        let out = associate(ChartType::Pie, &Marks::Pie(circle, wedges), &regions, &ExtractConfig::default());
        assert_eq!(out.data.categories, vec!["East".to_string(), "unlabeled-1".to_string()]);
        assert_eq!(out.warnings.len(), 1);
    }

    #[test]
    fn bars_take_the_nearest_tick_label() {
        let bar = |x: i32| BarMark {
            bbox: BBox::new(x, 50, 20, 100),
            color: Rgb::new(1, 2, 3),
            base: Side::Bottom,
            baseline: 150,
            length_px: 100,
            value: Some(10.0),
        };
        let regions = vec![
            region("B", TextRole::XValue, BBox::new(72, 160, 16, 10)),
            region("A", TextRole::XValue, BBox::new(12, 160, 16, 10)),
        ];
        let out = associate(ChartType::VBar, &Marks::Bars(vec![bar(10), bar(70)]), &regions, &ExtractConfig::default());
        assert_eq!(out.data.categories, vec!["A".to_string(), "B".to_string()]);
        assert!(out.warnings.is_empty());
    }

    #[test]
    fn segments_take_the_legend_series() {
        let bar = BarMark {
            bbox: BBox::new(10, 50, 20, 100),
            color: Rgb::new(1, 2, 3),
            base: Side::Bottom,
            baseline: 150,
            length_px: 100,
            value: None,
        };
        let seg = |c: Rgb, a: f64, b: f64| StackSegment { bar: 0, color: c, span_px: (a, b), value: Some(b - a), series: None };
        let red = Rgb::new(214, 39, 40);
        let blue = Rgb::new(31, 119, 180);
        let mut l1 = region("North", TextRole::Legend, BBox::new(200, 10, 40, 10));
        l1.patch_color = Some(blue);
        let mut l2 = region("South", TextRole::Legend, BBox::new(200, 30, 40, 10));
        l2.patch_color = Some(red);
        let regions = vec![l1, l2, region("Q1", TextRole::XValue, BBox::new(12, 160, 16, 10))];
        let marks = Marks::Stacks(vec![bar], vec![seg(Rgb::new(214, 45, 40), 0.0, 60.0), seg(blue, 60.0, 100.0)]);
        let out = associate(ChartType::StackedVBar, &marks, &regions, &ExtractConfig::default());
        let series: Vec<_> = out.data.marks.iter().map(|m| m.series.clone().unwrap()).collect();
        assert_eq!(series, vec!["South", "North"]);
    }
}
