//! Chart type from visual features: a circular outline means a pie,
//! the side bars rest on gives the orientation and color changes along a
//! bar mean stacking.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extract::{extract_bars, extract_stacks, find_pie_circle, mark_components, ExtractConfig};
use crate::raster::{BBox, RasterImage};
use crate::textdetect::{detect_text_regions, DetectConfig};
use crate::types::ChartType;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassifyConfig {
    /// Circumference support at or above which a chart is a pie.
    pub pie_support: f64,
    /// Color runs along a bar at or above which bars are stacked.
    pub stacked_runs: usize,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            pie_support: 0.6,
            stacked_runs: 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aspect {
    Wide,
    Tall,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartFeatures {
    /// Fraction of the best-fit circle's outline backed by edges.
    pub circle_inlier_ratio: f64,
    pub mark_count: usize,
    /// Growth direction of the bars: tall when they rest on a horizontal
    /// axis.
    pub mark_aspect_majority: Aspect,
    pub max_color_runs_per_mark: usize,
    /// Fraction of marks resting on the common axis line.
    pub mark_axis_alignment: f64,
}

pub fn extract_features(img: &RasterImage, extract: &ExtractConfig) -> Result<ChartFeatures> {
    let boxes: Vec<BBox> = detect_text_regions(img, &DetectConfig::default())
        .iter()
        .map(|r| r.bbox)
        .collect();
    extract_features_with(img, &boxes, extract)
}

/// [`extract_features`] with text already located.
pub fn extract_features_with(img: &RasterImage, text_boxes: &[BBox], extract: &ExtractConfig) -> Result<ChartFeatures> {
    let circle_inlier_ratio = match find_pie_circle(img, text_boxes, extract) {
        Ok((_, support)) => support,
        Err(Error::FitFailure(_)) => 0.0,
        Err(e) => return Err(e),
    };
    let mark_count = mark_components(img, text_boxes, extract)?.len();
    let mut f = ChartFeatures {
        circle_inlier_ratio,
        mark_count,
        mark_aspect_majority: Aspect::None,
        max_color_runs_per_mark: usize::from(mark_count > 0),
        mark_axis_alignment: 0.0,
    };
    if let Ok(bars) = extract_bars(img, text_boxes, extract) {
        f.mark_aspect_majority = if bars[0].base.grows_vertically() { Aspect::Tall } else { Aspect::Wide };
        f.mark_axis_alignment = bars.len() as f64 / mark_count.max(1) as f64;
        f.max_color_runs_per_mark = bars
            .iter()
            .enumerate()
            .filter_map(|(i, b)| extract_stacks(b, i, img, extract).ok())
            .map(|s| s.len())
            .max()
            .unwrap_or(1);
    }
    Ok(f)
}

/// Decide the chart type from features, with a confidence in `[0, 1]`.
pub fn classify_features(f: &ChartFeatures, cfg: &ClassifyConfig) -> Result<(ChartType, f64)> {
    let t = cfg.pie_support;
    if f.circle_inlier_ratio >= t {
        let margin = (f.circle_inlier_ratio - t) / (1.0 - t).max(1e-9);
        return Ok((ChartType::Pie, (0.5 + 0.5 * margin).clamp(0.0, 1.0)));
    }
    if f.mark_count == 0 || f.mark_aspect_majority == Aspect::None {
        return Err(Error::ClassificationFailure(format!(
            "no pie outline and no bars ({} marks)",
            f.mark_count
        )));
    }
    let horizontal = f.mark_aspect_majority == Aspect::Wide;
    let stacked = f.max_color_runs_per_mark >= cfg.stacked_runs;
    let not_pie = (t - f.circle_inlier_ratio) / t.max(1e-9);
    let score = f.mark_axis_alignment.min(not_pie).clamp(0.0, 1.0);
    Ok((ChartType::with_orientation(horizontal, stacked), score))
}

pub fn classify(img: &RasterImage, cfg: &ClassifyConfig, extract: &ExtractConfig) -> Result<(ChartType, f64)> {
    classify_features(&extract_features(img, extract)?, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chartgen::{random_spec, render};
    use crate::raster::Rgb;

    fn features(t: ChartType, seed: u64) -> ChartFeatures {
        let (img, _) = render(&random_spec(t, seed)).unwrap();
        extract_features(&img, &ExtractConfig::default()).unwrap()
    }

    #[test]
    fn pie_outline_is_well_supported() {
        for seed in 0..3 {
            let f = features(ChartType::Pie, seed);
            assert!(f.circle_inlier_ratio >= 0.8, "{f:?}");
        }
    }

    #[test]
    fn vertical_bars_are_tall_and_single_colored() {
        let f = features(ChartType::VBar, 2);
        assert_eq!(f.mark_aspect_majority, Aspect::Tall);
        assert_eq!(f.max_color_runs_per_mark, 1);
    }

    #[test]
    fn every_type_is_recognized() {
        for t in ChartType::ALL {
            for seed in 0..3 {
                let (img, _) = render(&random_spec(t, seed)).unwrap();
                let (got, score) = classify(&img, &ClassifyConfig::default(), &ExtractConfig::default()).unwrap();
                assert_eq!(got, t, "seed {seed}");
                assert!((0.0..=1.0).contains(&score));
            }
        }
    }

    #[test]
    fn blank_image_cannot_be_classified() {
        let img = RasterImage::filled(200, 150, Rgb::WHITE);
        let f = extract_features(&img, &ExtractConfig::default()).unwrap();
        assert_eq!(f.mark_count, 0);
        assert!(matches!(
            classify(&img, &ClassifyConfig::default(), &ExtractConfig::default()),
            Err(Error::ClassificationFailure(_))
        ));
    }

    #[test]
    fn same_bytes_same_answer() {
        let (img, _) = render(&random_spec(ChartType::StackedHBar, 7)).unwrap();
        let c = ClassifyConfig::default();
        let e = ExtractConfig::default();
        assert_eq!(classify(&img, &c, &e).unwrap(), classify(&img, &c, &e).unwrap());
    }
}
