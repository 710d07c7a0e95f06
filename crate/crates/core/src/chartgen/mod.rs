//! Deterministic synthetic chart renderer with exact ground truth.

mod layout;
mod render;
mod truth;
mod words;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::Rgb;
use crate::types::ChartType;

pub use layout::{layout, Layout, PlacedText};
pub use render::{render, render_text_crop};
pub use truth::{
    gen_corpus, read_manifest, ManifestEntry, GroundTruth, TruthMark, TruthText, Wedge,
};

/// Mark colors: luminance 85..=160, pairwise RGB distance >= 60, far from
/// both the dark text colors and the light backgrounds.
pub const PALETTE: [Rgb; 13] = [
    Rgb::new(31, 119, 180),
    Rgb::new(255, 127, 14),
    Rgb::new(44, 160, 44),
    Rgb::new(214, 39, 40),
    Rgb::new(148, 103, 189),
    Rgb::new(140, 86, 75),
    Rgb::new(227, 119, 194),
    Rgb::new(150, 150, 20),
    Rgb::new(23, 190, 207),
    Rgb::new(200, 60, 160),
    Rgb::new(0, 128, 128),
    Rgb::new(90, 160, 220),
    Rgb::new(60, 180, 110),
];

const BACKGROUNDS: [Rgb; 5] = [
    Rgb::new(255, 255, 255),
    Rgb::new(250, 250, 245),
    Rgb::new(245, 245, 250),
    Rgb::new(240, 240, 240),
    Rgb::new(248, 244, 236),
];

const TEXT_COLORS: [Rgb; 4] = [
    Rgb::new(0, 0, 0),
    Rgb::new(30, 30, 30),
    Rgb::new(20, 20, 40),
    Rgb::new(45, 40, 35),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LegendPosition {
    Right,
    Top,
}

/// Visual parameters of a chart. Canvas size is derived from these and the
/// content by [`layout`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AestheticSpec {
    /// Integer magnification of the 8x8 font.
    pub font_scale: u32,
    /// Outer margin around all content.
    pub margin: u32,
    pub title_gap: u32,
    pub label_gap: u32,
    pub tick_length: u32,
    /// Bar thickness as a fraction of the category pitch.
    pub bar_width_frac: f64,
    /// Distance between neighbouring bar centers.
    pub category_pitch: u32,
    /// Pixels per value unit along the value axis.
    pub pixels_per_unit: u32,
    pub tick_step: u32,
    pub tick_count: u32,
    /// Rotation of the tick labels under the bottom axis: 0, 45 or 90.
    pub tick_rotation: u32,
    pub grid: bool,
    /// Draw all four plot spines instead of only left and bottom.
    pub box_spines: bool,
    pub legend: Option<LegendPosition>,
    /// One color per series (bars) or per category (pie).
    pub colors: Vec<Rgb>,
    pub background: Rgb,
    pub plot_background: Rgb,
    pub text_color: Rgb,
    pub grid_color: Rgb,
    pub pie_radius: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartSpec {
    pub chart_type: ChartType,
    pub title: String,
    pub x_label: Option<String>,
    pub y_label: Option<String>,
    pub categories: Vec<String>,
    pub series: Vec<String>,
    /// `values[category][series]`.
    pub values: Vec<Vec<f64>>,
    pub aesthetics: AestheticSpec,
    pub seed: u64,
}

impl ChartSpec {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::invalid(format!("invalid chart spec: {m}")));
        if self.categories.is_empty() {
            return fail("no categories");
        }
        if self.values.len() != self.categories.len()
            || self.values.iter().any(|row| row.len() != self.series.len())
        {
            return fail("values must be categories x series");
        }
        if self.values.iter().flatten().any(|v| !v.is_finite() || *v < 0.0) {
            return fail("values must be finite and non-negative");
        }
        let stacked = self.chart_type.is_stacked();
        if stacked != (self.series.len() >= 2) {
            return fail("series count must be >= 2 exactly for stacked charts");
        }
        if !stacked && self.series.len() != 1 {
            return fail("non-stacked charts carry exactly one series");
        }
        let a = &self.aesthetics;
        if self.chart_type == ChartType::Pie {
            if self.values.iter().map(|r| r[0]).sum::<f64>() <= 0.0 {
                return fail("pie values must sum to a positive total");
            }
            if a.colors.len() < self.categories.len() {
                return fail("pie needs one color per category");
            }
        } else {
            if a.colors.len() < self.series.len() {
                return fail("one color per series required");
            }
            if a.tick_step == 0 || a.pixels_per_unit == 0 || a.category_pitch == 0 {
                return fail("tick step, scale and pitch must be positive");
            }
            if ![0, 45, 90].contains(&a.tick_rotation) {
                return fail("tick rotation must be 0, 45 or 90");
            }
        }
        if stacked && a.legend.is_none() {
            return fail("stacked charts need a legend");
        }
        if a.font_scale == 0 {
            return fail("font scale must be positive");
        }
        for (i, x) in a.colors.iter().enumerate() {
            for y in &a.colors[i + 1..] {
                if x.distance(y) < 60.0 {
                    return fail("series colors must be at least 60 apart");
                }
            }
        }
        Ok(())
    }

    /// Largest value the value axis must reach (bar charts).
    pub fn max_extent(&self) -> f64 {
        self.values
            .iter()
            .map(|row| if self.chart_type.is_stacked() { row.iter().sum() } else { row[0] })
            .fold(0.0, f64::max)
    }

    pub fn axis_max(&self) -> f64 {
        let a = &self.aesthetics;
        ((a.tick_count.max(2) - 1) * a.tick_step) as f64
    }
}

fn title_case_phrase(rng: &mut ChaCha8Rng) -> String {
    let noun = *words::NOUNS.choose(rng).unwrap();
    match rng.random_range(0..4) {
        0 => format!("{noun} {} the {}", words::CONNECTORS.choose(rng).unwrap(), words::CONTEXTS.choose(rng).unwrap()),
        1 => format!("{noun} {} {}", words::CONNECTORS.choose(rng).unwrap(), words::CONTEXTS.choose(rng).unwrap()),
        2 => format!("{noun} in {}", words::YEARS.choose(rng).unwrap()),
        _ => format!("{} {noun}", words::CONTEXTS.choose(rng).unwrap()),
    }
}

fn pick_colors(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rgb> {
    let mut pal = PALETTE.to_vec();
    pal.shuffle(rng);
    pal.truncate(n);
    pal
}

fn nice_steps() -> &'static [u32] {
    &[5, 10, 20, 25, 50, 100]
}

/// Sample a spec whose layout is valid. Deterministic per `(chart_type, seed)`.
pub fn random_spec(chart_type: ChartType, seed: u64) -> ChartSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((chart_type.index() as u64 + 1) << 56));
    for _ in 0..500 {
        let spec = sample_spec(&mut rng, chart_type, seed);
        if spec.validate().is_ok() && layout(&spec).is_ok() {
            return spec;
        }
    }
    panic!("no valid layout found for {chart_type} seed {seed}");
}

fn sample_spec(rng: &mut ChaCha8Rng, chart_type: ChartType, seed: u64) -> ChartSpec {
    let stacked = chart_type.is_stacked();
    let pie = chart_type == ChartType::Pie;

    let (mut categories, category_axis): (Vec<String>, String) = if rng.random_bool(0.15) {
        let start = rng.random_range(0..words::YEARS.len() - 3);
        (words::YEARS[start..].iter().map(|s| s.to_string()).collect(), "Year".into())
    } else {
        let i = rng.random_range(0..words::CATEGORY_SETS.len());
        (
            words::CATEGORY_SETS[i].iter().map(|s| s.to_string()).collect(),
            words::CATEGORY_AXIS_NAMES[i].to_string(),
        )
    };
    let max_n = if pie { 6 } else { 8 };
    let n = rng.random_range(3..=max_n.min(categories.len()));
    if rng.random_bool(0.5) {
        categories.shuffle(rng);
    }
    categories.truncate(n);

    let series: Vec<String> = if stacked {
        let set = words::SERIES_SETS.choose(rng).unwrap();
        let k = rng.random_range(2..=set.len().min(4));
        set[..k].iter().map(|s| s.to_string()).collect()
    } else {
        vec!["value".to_string()]
    };

    let values: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            (0..series.len())
                .map(|_| {
                    let v = if stacked { rng.random_range(10..=60) } else { rng.random_range(10..=100) };
                    v as f64
                })
                .collect()
        })
        .collect();

    let font_scale = if rng.random_bool(0.6) { 2 } else { 3 };
    let background = *BACKGROUNDS.choose(rng).unwrap();
    let plot_background = if rng.random_bool(0.5) {
        background
    } else {
        let l = background.0.iter().map(|&c| c as i32).min().unwrap() - rng.random_range(4..=10);
        Rgb::new(l as u8, l as u8, l as u8)
    };
    let grid_shade = rng.random_range(205..=220);
    let colors = pick_colors(rng, if pie { n } else { series.len() });

    // Value axis: a nice step and an integer pixel scale keep every bar
    // edge on a pixel boundary.
    let max_value = values
        .iter()
        .map(|row| if stacked { row.iter().sum::<f64>() } else { row[0] })
        .fold(0.0, f64::max) as u32;
    let cell = 8 * font_scale;
    let mut options = Vec::new();
    for &step in nice_steps() {
        let ticks = max_value.div_ceil(step) + 1;
        if !(3..=9).contains(&ticks) {
            continue;
        }
        let axis_max = (ticks - 1) * step;
        for ppu in 1..=8u32 {
            let len = axis_max * ppu;
            if (200..=460).contains(&len) && step * ppu >= 11 * cell / 4 {
                options.push((step, ticks, ppu));
            }
        }
    }
    let (tick_step, tick_count, pixels_per_unit) = options.choose(rng).copied().unwrap_or((10, 2, 1));

    let legend = if stacked {
        Some(if rng.random_bool(0.5) { LegendPosition::Right } else { LegendPosition::Top })
    } else if pie && rng.random_bool(0.4) {
        Some(LegendPosition::Right)
    } else {
        None
    };

    let unit = words::AXIS_UNITS.choose(rng).unwrap();
    let suffix = words::AXIS_SUFFIXES.choose(rng).unwrap();
    let value_axis = format!("{unit}{suffix}");
    let (x_label, y_label) = if pie {
        (None, None)
    } else if chart_type.is_horizontal() {
        (Some(value_axis), Some(category_axis))
    } else {
        (Some(category_axis), Some(value_axis))
    };

    let aesthetics = AestheticSpec {
        font_scale,
        margin: rng.random_range(10..=30),
        title_gap: rng.random_range(3..=6) * font_scale * 4,
        label_gap: rng.random_range(2..=4) * font_scale * 4,
        tick_length: rng.random_range(4..=7),
        bar_width_frac: rng.random_range(40..=80) as f64 / 100.0,
        category_pitch: rng.random_range(22..=40) * font_scale + rng.random_range(0..2) * 20,
        pixels_per_unit,
        tick_step,
        tick_count,
        tick_rotation: *[0u32, 45, 90].choose(rng).unwrap(),
        grid: rng.random_bool(0.5),
        box_spines: rng.random_bool(0.3),
        legend,
        colors,
        background,
        plot_background,
        text_color: *TEXT_COLORS.choose(rng).unwrap(),
        grid_color: Rgb::new(grid_shade, grid_shade, grid_shade),
        pie_radius: rng.random_range(110..=180),
    };

    ChartSpec {
        chart_type,
        title: title_case_phrase(rng),
        x_label,
        y_label,
        categories,
        series,
        values,
        aesthetics,
        seed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn palette_contract() {
        for (i, a) in PALETTE.iter().enumerate() {
            assert!((85..=160).contains(&a.luma()), "{a:?}");
            for b in &PALETTE[i + 1..] {
                assert!(a.distance(b) >= 60.0, "{a:?} {b:?}");
            }
        }
    }

    #[test]
    fn random_spec_is_deterministic() {
        assert_eq!(random_spec(ChartType::Pie, 1), random_spec(ChartType::Pie, 1));
        assert_ne!(random_spec(ChartType::Pie, 1), random_spec(ChartType::Pie, 2));
    }

    #[test]
    fn stacked_specs_have_series_and_legend() {
        for seed in 0..20 {
            for t in [ChartType::StackedVBar, ChartType::StackedHBar] {
                let s = random_spec(t, seed);
                assert!(s.series.len() >= 2);
                assert!(s.aesthetics.legend.is_some());
            }
        }
    }

    #[test]
    fn category_counts_in_range() {
        for seed in 0..30 {
            for t in ChartType::ALL {
                let s = random_spec(t, seed);
                assert!((3..=8).contains(&s.categories.len()));
                s.validate().unwrap();
            }
        }
    }

    #[test]
    fn aesthetic_coverage_over_many_seeds() {
        let mut seen = HashSet::new();
        for seed in 0..1000u64 {
            let t = ChartType::ALL[(seed % 5) as usize];
            let a = random_spec(t, seed).aesthetics;
            if t.is_bar() {
                seen.insert(format!("rot{}", a.tick_rotation));
                seen.insert(format!("grid{}", a.grid));
            }
            if let Some(p) = a.legend {
                seen.insert(format!("{t}-{p:?}"));
            }
        }
        for key in ["rot0", "rot45", "rot90", "gridtrue", "gridfalse", "pie-Right"] {
            assert!(seen.contains(key), "{key} never sampled");
        }
        for t in ["stacked_hbar", "stacked_vbar"] {
            for p in ["Right", "Top"] {
                assert!(seen.contains(&format!("{t}-{p}")), "{t} {p}");
            }
        }
    }
}
