//! End-to-end wiring: classify, detect text, read it, extract marks,
//! attach labels and write the alt-text.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::alttext;
use crate::classify::{classify_features, extract_features_with, ClassifyConfig};
use crate::error::{Error, Result};
use crate::extract::{
    associate, compute_pixel_scale, extract_bars, extract_pie, extract_stacks, find_pie_circle, snap_to_marks,
    tick_mark_centers, Axis, BarMark, ChartData, ExtractConfig, Marks, Provenance,
};
use crate::ocr::{
    deskew_with_hint, normalize_height, read_line, EngineKind, ExternalEngine, OcrEngine, TARGET_HEIGHT,
};
use crate::raster::{BBox, BinaryImage, RasterImage};
use crate::textdetect::{
    assign_roles, detect_text_regions, ink_mask, structure_ink, AxisFrame, DetectConfig, RoleConfig, TextRegion,
};
use crate::types::{ChartType, TextRole};

/// Version of the JSON emitted by [`describe`].
pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable naming a config file.
pub const CONFIG_ENV: &str = "CHART2TEXT_CONFIG";

/// Tick labels are moved onto a tick mark this close to their center.
const TICK_SNAP_PX: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct ExternalOcrConfig {
    /// Command line with a `{path}` placeholder for the crop.
    pub cmd: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct OcrConfig {
    pub engine: EngineKind,
    pub external: ExternalOcrConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalConfig {
    /// Smallest edit similarity counted as a text match.
    pub text_similarity: f64,
    /// Largest relative error counted as a value match.
    pub value_tolerance: f64,
    /// Absolute tolerance when the true value is zero.
    pub epsilon_zero: f64,
    pub iou_min: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            text_similarity: 0.8,
            value_tolerance: 0.02,
            epsilon_zero: 0.5,
            iou_min: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub detect: DetectConfig,
    pub roles: RoleConfig,
    pub classify: ClassifyConfig,
    pub extract: ExtractConfig,
    pub ocr: OcrConfig,
    pub eval: EvalConfig,
    /// Corpus seed for `gen`.
    pub seed: u64,
    pub log_level: String,
    /// Worker threads for corpus jobs; `None` uses every core.
    pub threads: Option<usize>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            detect: DetectConfig::default(),
            roles: RoleConfig::default(),
            classify: ClassifyConfig::default(),
            extract: ExtractConfig::default(),
            ocr: OcrConfig::default(),
            eval: EvalConfig::default(),
            seed: 0,
            log_level: "warn".to_string(),
            threads: None,
        }
    }
}

impl PipelineConfig {
    /// Parse a config document: JSON if it starts with `{`, otherwise
    /// `section.key = value` lines with `#` comments. Values are read as
    /// JSON literals where possible and as bare strings otherwise.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            return Ok(serde_json::from_str(text)?);
        }
        let mut cfg = PipelineConfig::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::invalid(format!("config line {}: expected key = value", n + 1)))?;
            cfg.set(k.trim(), v.trim())?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Set one dotted key, e.g. `extract.color_jump`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let mut root = serde_json::to_value(&*self)?;
        let mut slot = &mut root;
        for part in key.split('.') {
            slot = slot
                .as_object_mut()
                .and_then(|o| o.get_mut(part))
                .ok_or_else(|| Error::invalid(format!("unknown config key {key:?}")))?;
        }
        let wants_string = slot.is_string() || (slot.is_null() && key_is_textual(key));
        *slot = match serde_json::from_str::<Value>(value) {
            Ok(v) if !wants_string || v.is_string() => v,
            _ => Value::String(value.trim_matches('"').to_string()),
        };
        *self = serde_json::from_value(root)
            .map_err(|e| Error::invalid(format!("config key {key:?}: {e}")))?;
        Ok(())
    }
}

fn key_is_textual(key: &str) -> bool {
    key == "ocr.external.cmd"
}

/// How far [`describe`] runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Classify,
    Detect,
    Ocr,
    #[default]
    Full,
}

impl std::str::FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classify" => Ok(Stage::Classify),
            "detect" => Ok(Stage::Detect),
            "ocr" => Ok(Stage::Ocr),
            "full" => Ok(Stage::Full),
            other => Err(Error::invalid(format!("unknown stage {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Description {
    pub schema_version: u32,
    pub stage: Stage,
    pub chart_type: ChartType,
    pub classification_score: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub regions: Vec<TextRegion>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<ChartData>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alt_text: Option<String>,
    #[serde(default)]
    pub warnings: Vec<String>,
    pub provenance: Provenance,
}

fn make_engine(cfg: &OcrConfig) -> Result<Option<Box<dyn OcrEngine>>> {
    match cfg.engine {
        EngineKind::Builtin => Ok(None),
        EngineKind::External => {
            let cmd = cfg
                .external
                .cmd
                .as_deref()
                .ok_or_else(|| Error::EngineUnavailable("ocr.external.cmd is not set".into()))?;
            Ok(Some(Box::new(ExternalEngine::new(cmd))))
        }
    }
}

fn engine_name(cfg: &OcrConfig) -> &'static str {
    match cfg.engine {
        EngineKind::Builtin => "builtin",
        EngineKind::External => "external",
    }
}

/// Regions too short to measure their own angle borrow the median angle of
/// measured lines with the same role.
fn settle_hints(regions: &mut [TextRegion]) {
    let hints: Vec<(Option<TextRole>, f64)> = regions
        .iter()
        .filter(|r| r.hint_reliable)
        .map(|r| (r.role, r.rotation_hint))
        .collect();
    for r in regions.iter_mut().filter(|r| !r.hint_reliable) {
        let mut same: Vec<f64> = hints.iter().filter(|h| h.0 == r.role).map(|h| h.1).collect();
        same.sort_by(f64::total_cmp);
        r.rotation_hint = if same.is_empty() { 0.0 } else { same[same.len() / 2] };
    }
}

fn read_with_engine(engine: &dyn OcrEngine, img: &RasterImage, region: &TextRegion) -> Result<String> {
    const PAD: i32 = 4;
    let Some(b) = region.bbox.inflate(PAD).intersect(&img.bounds()) else {
        return Ok(String::new());
    };
    let crop = img.crop(b).expect("box lies inside the image");
    let mask = BinaryImage::from_fn(b.w as usize, b.h as usize, |x, y| {
        let (mx, my) = (x as i64 + (b.x - region.bbox.x) as i64, y as i64 + (b.y - region.bbox.y) as i64);
        region.mask.get_checked(mx, my).unwrap_or(false)
    });
    let (upright, _) = deskew_with_hint(&crop, &mask, region.rotation_hint);
    engine.recognize(&normalize_height(&upright, TARGET_HEIGHT))
}

fn read_regions(img: &RasterImage, regions: &mut [TextRegion], cfg: &OcrConfig) -> Result<()> {
    let engine = make_engine(cfg)?;
    for r in regions.iter_mut() {
        r.text = match &engine {
            None => read_line(&r.mask, Some(r.rotation_hint)).text,
            Some(e) => read_with_engine(e.as_ref(), img, r)?,
        };
    }
    Ok(())
}

/// Fill in bar values from the tick labels on the value axis.
fn scale_bars(img: &RasterImage, regions: &[TextRegion], bars: &mut [BarMark], detect: &DetectConfig) -> Result<f64> {
    let vertical = bars.first().is_none_or(|b| b.base.grows_vertically());
    let (role, axis) = if vertical { (TextRole::YValue, Axis::Y) } else { (TextRole::XValue, Axis::X) };
    let structure = structure_ink(&ink_mask(img, detect), regions);
    let marks = AxisFrame::find(&structure)
        .map(|f| tick_mark_centers(&structure, &f, axis))
        .unwrap_or_default();
    let ticks: Vec<(&str, f64)> = regions
        .iter()
        .filter(|r| r.role == Some(role))
        .map(|r| {
            let (x, y) = r.center();
            (r.text.as_str(), snap_to_marks(if vertical { y } else { x }, &marks, TICK_SNAP_PX))
        })
        .collect();
    let scale = compute_pixel_scale(&ticks, axis)?;
    for b in bars.iter_mut() {
        let far = b.far_edge() as f64;
        b.value = Some(scale.value_at(far));
    }
    Ok(scale.ratio)
}

fn extract_marks(
    chart_type: ChartType,
    img: &RasterImage,
    regions: &[TextRegion],
    cfg: &PipelineConfig,
    warnings: &mut Vec<String>,
) -> Result<Marks> {
    let boxes: Vec<BBox> = regions.iter().map(|r| r.bbox).collect();
    if chart_type == ChartType::Pie {
        let (circle, _) = find_pie_circle(img, &boxes, &cfg.extract)?;
        return Ok(Marks::Pie(circle, extract_pie(img, &circle, &cfg.extract)?));
    }
    let mut bars = extract_bars(img, &boxes, &cfg.extract)?;
    let ratio = match scale_bars(img, regions, &mut bars, &cfg.detect) {
        Ok(r) => Some(r),
        Err(e) => {
            warnings.push(format!("values left blank: {e}"));
            None
        }
    };
    if !chart_type.is_stacked() {
        return Ok(Marks::Bars(bars));
    }
    let mut segments = Vec::new();
    for (i, b) in bars.iter().enumerate() {
        match extract_stacks(b, i, img, &cfg.extract) {
            Ok(mut s) => {
                for seg in s.iter_mut() {
                    seg.value = ratio.map(|r| seg.length_px() * r);
                }
                segments.extend(s);
            }
            Err(e) => warnings.push(format!("bar {i}: {e}")),
        }
    }
    Ok(Marks::Stacks(bars, segments))
}

/// Run the pipeline on one image up to `stage`. With `chart_type` given
/// the classifier is skipped.
pub fn describe_as(
    img: &RasterImage,
    cfg: &PipelineConfig,
    stage: Stage,
    chart_type: Option<ChartType>,
) -> Result<Description> {
    let found = detect_text_regions(img, &cfg.detect);
    let (chart_type, score) = match chart_type {
        Some(t) => (t, 1.0),
        None => {
            let boxes: Vec<BBox> = found.iter().map(|r| r.bbox).collect();
            let features = extract_features_with(img, &boxes, &cfg.extract)?;
            log::debug!("features {features:?}");
            classify_features(&features, &cfg.classify)?
        }
    };
    let provenance = Provenance::new(engine_name(&cfg.ocr), &cfg.extract);
    let mut out = Description {
        schema_version: SCHEMA_VERSION,
        stage,
        chart_type,
        classification_score: score,
        regions: Vec::new(),
        data: None,
        alt_text: None,
        warnings: Vec::new(),
        provenance: provenance.clone(),
    };
    if stage == Stage::Classify {
        return Ok(out);
    }

    let mut regions = assign_roles(found, chart_type, img, &cfg.detect, &cfg.roles);
    settle_hints(&mut regions);
    if stage != Stage::Detect {
        read_regions(img, &mut regions, &cfg.ocr)?;
    }
    if matches!(stage, Stage::Detect | Stage::Ocr) {
        out.regions = regions;
        return Ok(out);
    }

    let marks = extract_marks(chart_type, img, &regions, cfg, &mut out.warnings)?;
    let assoc = associate(chart_type, &marks, &regions, &cfg.extract);
    out.warnings.extend(assoc.warnings);
    let mut data = assoc.data;
    data.provenance = provenance;
    match alttext::describe(&data) {
        Ok(a) => out.alt_text = Some(a.text),
        Err(e) => out.warnings.push(format!("no alt-text: {e}")),
    }
    out.data = Some(data);
    out.regions = regions;
    Ok(out)
}

pub fn describe(img: &RasterImage, cfg: &PipelineConfig, stage: Stage) -> Result<Description> {
    describe_as(img, cfg, stage, None)
}
