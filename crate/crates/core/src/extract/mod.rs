//! Data extraction from bar, stacked bar and pie charts, pixel-to-value
//! scaling and association of marks with their labels.

mod associate;
mod bars;
mod pie;
mod scale;

pub use associate::{associate, Association, Marks};
pub use bars::{extract_bars, extract_stacks, mark_components, BarMark, Side, StackSegment};
pub use pie::{circle_support, extract_pie, find_pie_circle, PieWedge};
pub use scale::{compute_pixel_scale, parse_number, pixels_to_value, snap_to_marks, tick_mark_centers, Axis, PixelScale};

use serde::{Deserialize, Serialize};

use crate::raster::BBox;
use crate::types::ChartType;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExtractConfig {
    pub median_kernel: usize,
    /// Components smaller than this are discarded; `None` scales with the
    /// image.
    pub min_area: Option<usize>,
    /// RGB distance marking a stack or wedge boundary.
    pub color_jump: f64,
    /// Jumps at most this many samples apart form one boundary.
    pub transition_width: usize,
    /// Stack segments shorter than this many pixels merge into a neighbor.
    pub min_segment_px: f64,
    /// Largest RGB distance between a mark and its legend swatch.
    pub series_match: f64,
    /// Axis lines are at most this bright.
    pub axis_luma_max: u8,
    pub canny_low: f64,
    pub canny_high: f64,
    pub ransac_iterations: usize,
    pub ransac_tolerance: f64,
    pub ransac_seed: u64,
    pub pie_samples: usize,
    /// Radius of the sampling circle as a fraction of the pie radius.
    pub pie_sample_radius: f64,
    /// Refine wedge boundaries by line fits across the outer disk.
    pub pie_refine: bool,
    /// Inner and outer radius of the refinement band, as fractions of the
    /// pie radius.
    pub pie_refine_radii: (f64, f64),
}

impl Default for ExtractConfig {
    fn default() -> Self {
        ExtractConfig {
            median_kernel: 7,
            min_area: None,
            color_jump: 30.0,
            transition_width: 2,
            min_segment_px: 3.0,
            series_match: 60.0,
            axis_luma_max: 68,
            canny_low: 40.0,
            canny_high: 100.0,
            ransac_iterations: 500,
            ransac_tolerance: 2.0,
            ransac_seed: 42,
            pie_samples: 1000,
            pie_sample_radius: 0.2,
            pie_refine: true,
            pie_refine_radii: (0.3, 0.9),
        }
    }
}

/// One recovered data point: a bar, a stack segment or a pie wedge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataMark {
    pub category: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series: Option<String>,
    /// Chart units for bars, percent for pie wedges. Absent when no
    /// scale could be read off the axis.
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bbox: Option<BBox>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wedge: Option<(f64, f64)>,
}

/// Settings that shaped an extraction, echoed in the output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Provenance {
    pub ocr_engine: String,
    pub color_jump: f64,
    pub ransac_seed: u64,
    pub ransac_iterations: usize,
    pub median_kernel: usize,
}

impl Provenance {
    pub fn new(ocr_engine: &str, cfg: &ExtractConfig) -> Self {
        Provenance {
            ocr_engine: ocr_engine.to_string(),
            color_jump: cfg.color_jump,
            ransac_seed: cfg.ransac_seed,
            ransac_iterations: cfg.ransac_iterations,
            median_kernel: cfg.median_kernel,
        }
    }
}

/// Everything recovered from one chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartData {
    pub chart_type: ChartType,
    pub title: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_label: Option<String>,
    pub categories: Vec<String>,
    pub series: Vec<String>,
    pub marks: Vec<DataMark>,
    #[serde(default)]
    pub provenance: Provenance,
}

impl ChartData {
    pub fn empty(chart_type: ChartType) -> Self {
        ChartData {
            chart_type,
            title: None,
            x_label: None,
            y_label: None,
            categories: Vec::new(),
            series: Vec::new(),
            marks: Vec::new(),
            provenance: Provenance::default(),
        }
    }

    /// Value of the mark for `category` (and `series` on stacked charts).
    pub fn value_of(&self, category: &str, series: Option<&str>) -> Option<f64> {
        self.marks
            .iter()
            .find(|m| m.category == category && (series.is_none() || m.series.as_deref() == series))
            .and_then(|m| m.value)
    }
}
