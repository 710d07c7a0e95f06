use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::write_png;
use crate::raster::BBox;
use crate::types::{ChartType, TextRole};

use super::{random_spec, render, ChartSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthText {
    pub string: String,
    pub role: TextRole,
    pub bbox: BBox,
    /// Counter-clockwise rotation of the rendered text in degrees.
    #[serde(default, skip_serializing_if = "is_zero")]
    pub rotation: f64,
}

fn is_zero(v: &f64) -> bool {
    *v == 0.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wedge {
    pub start_deg: f64,
    pub end_deg: f64,
}

impl Wedge {
    pub fn sweep(&self) -> f64 {
        self.end_deg - self.start_deg
    }

    pub fn bisector(&self) -> f64 {
        (self.start_deg + self.end_deg) / 2.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthMark {
    pub category: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series: Option<String>,
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bbox: Option<BBox>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wedge: Option<Wedge>,
}

/// Everything the renderer knows about a chart image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub chart_type: ChartType,
    pub title: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_label: Option<String>,
    pub texts: Vec<TruthText>,
    pub marks: Vec<TruthMark>,
    /// `[cx, cy, radius]` of the pie disk.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pie_circle: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<ChartSpec>,
}

impl GroundTruth {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub png_path: String,
    pub truth_path: String,
    pub chart_type: ChartType,
    pub seed: u64,
}

impl ManifestEntry {
    /// Paths are stored relative to the manifest's directory.
    pub fn resolve(&self, base: &Path) -> (PathBuf, PathBuf) {
        (base.join(&self.png_path), base.join(&self.truth_path))
    }
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

/// Seed of the `i`-th chart of a type within a corpus.
fn chart_seed(seed: u64, chart_type: ChartType, i: usize) -> u64 {
    seed.wrapping_mul(1_000_003)
        .wrapping_add(chart_type.index() as u64 * 100_000)
        .wrapping_add(i as u64)
}

/// Render `per_type` charts of each type into `out_dir` with a truth file
/// each and a `manifest.json` listing them. Returns the manifest path.
pub fn gen_corpus(per_type: usize, seed: u64, out_dir: &Path, types: &[ChartType]) -> Result<PathBuf> {
    if per_type == 0 {
        return Err(Error::invalid("per_type must be at least 1"));
    }
    fs::create_dir_all(out_dir)?;
    let jobs: Vec<(ChartType, usize)> = types
        .iter()
        .flat_map(|&t| (0..per_type).map(move |i| (t, i)))
        .collect();
    let entries = jobs
        .par_iter()
        .map(|&(t, i)| -> Result<ManifestEntry> {
            let s = chart_seed(seed, t, i);
            let (img, truth) = render(&random_spec(t, s))?;
            let stem = format!("{}_{i:04}", t.key());
            let png = format!("{stem}.png");
            let json = format!("{stem}.json");
            write_png(&img, &out_dir.join(&png))?;
            fs::write(out_dir.join(&json), serde_json::to_string_pretty(&truth)?)?;
            Ok(ManifestEntry {
                png_path: png,
                truth_path: json,
                chart_type: t,
                seed: s,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let manifest = out_dir.join("manifest.json");
    fs::write(&manifest, serde_json::to_string_pretty(&entries)?)?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_file_counts_and_determinism() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let ma = gen_corpus(2, 7, a.path(), &ChartType::ALL).unwrap();
        let mb = gen_corpus(2, 7, b.path(), &ChartType::ALL).unwrap();
        let entries = read_manifest(&ma).unwrap();
        assert_eq!(entries.len(), 10);
        let pngs = fs::read_dir(a.path()).unwrap().filter(|e| {
            e.as_ref().unwrap().path().extension().is_some_and(|x| x == "png")
        }).count();
        assert_eq!(pngs, 10);
        assert_eq!(fs::read(&ma).unwrap(), fs::read(&mb).unwrap());
        for e in &entries {
            assert_eq!(fs::read(a.path().join(&e.png_path)).unwrap(), fs::read(b.path().join(&e.png_path)).unwrap());
            let truth = GroundTruth::load(&a.path().join(&e.truth_path)).unwrap();
            assert_eq!(truth.chart_type, e.chart_type);
        }
    }

    #[test]
    fn zero_per_type_is_rejected() {
        let d = tempfile::tempdir().unwrap();
        assert!(gen_corpus(0, 1, d.path(), &ChartType::ALL).is_err());
    }

    #[test]
    fn truth_schema_field_names() {
        let t = GroundTruth {
            chart_type: ChartType::VBar,
            title: "T".into(),
            x_label: Some("X".into()),
            y_label: None,
            texts: vec![TruthText {
                string: "T".into(),
                role: TextRole::ChartTitle,
                bbox: BBox::new(1, 2, 3, 4),
                rotation: 0.0,
            }],
            marks: vec![TruthMark {
                category: "a".into(),
                series: None,
                value: 5.0,
                bbox: Some(BBox::new(0, 0, 1, 1)),
                wedge: None,
            }],
            pie_circle: None,
            spec: None,
        };
        let v: serde_json::Value = serde_json::to_value(&t).unwrap();
        assert_eq!(v["chart_type"], "vbar");
        assert_eq!(v["texts"][0]["bbox"], serde_json::json!([1, 2, 3, 4]));
        assert_eq!(v["texts"][0]["role"], "chart_title");
        assert_eq!(v["marks"][0]["value"], 5.0);
        assert!(v.get("y_label").is_none());
        let back: GroundTruth = serde_json::from_value(v).unwrap();
        assert_eq!(back, t);
    }
}
