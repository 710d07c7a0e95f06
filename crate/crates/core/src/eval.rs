//! Accuracy metrics and corpus reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chartgen::{read_manifest, GroundTruth, ManifestEntry};
use crate::error::{Error, Result};
use crate::extract::{ChartData, DataMark, Provenance};
use crate::io::read_png;
use crate::pipeline::{describe, EvalConfig, PipelineConfig, Stage, SCHEMA_VERSION};
use crate::raster::BBox;
use crate::types::{ChartType, TextRole};

/// Unit-cost edit distance over Unicode scalar values.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// `1 - distance / longer length`; two empty strings are identical.
pub fn similarity(a: &str, b: &str) -> f64 {
    let n = a.chars().count().max(b.chars().count());
    if n == 0 {
        return 1.0;
    }
    1.0 - levenshtein(a, b) as f64 / n as f64
}

pub fn text_match_with(pred: &str, truth: &str, min_similarity: f64) -> bool {
    similarity(pred, truth) >= min_similarity - 1e-12
}

pub fn text_match(pred: &str, truth: &str) -> bool {
    text_match_with(pred, truth, EvalConfig::default().text_similarity)
}

pub fn value_match_with(calc: f64, truth: f64, tolerance: f64, epsilon_zero: f64) -> bool {
    if !calc.is_finite() {
        return false;
    }
    if truth == 0.0 {
        return calc.abs() <= epsilon_zero;
    }
    (calc - truth).abs() / truth.abs() <= tolerance + 1e-12
}

pub fn value_match(calc: f64, truth: f64) -> bool {
    let d = EvalConfig::default();
    value_match_with(calc, truth, d.value_tolerance, d.epsilon_zero)
}

pub fn iou(a: &BBox, b: &BBox) -> f64 {
    a.iou(b)
}

/// A predicted text box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub bbox: BBox,
    pub role: TextRole,
    pub confidence: f64,
    #[serde(default)]
    pub text: String,
}

/// Pools detections over many images for per-role average precision.
#[derive(Debug, Clone, Default)]
pub struct ApAccumulator {
    records: BTreeMap<TextRole, Vec<(f64, bool)>>,
    truths: BTreeMap<TextRole, usize>,
}

impl ApAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    /// Match one image's detections to its truths, most confident first,
    /// each truth at most once.
    pub fn add_image(&mut self, dets: &[Detection], truths: &[(BBox, TextRole)], iou_min: f64) {
        for &(_, role) in truths {
            *self.truths.entry(role).or_default() += 1;
        }
        let mut order: Vec<&Detection> = dets.iter().collect();
        order.sort_by(|a, b| b.confidence.total_cmp(&a.confidence));
        let mut used = vec![false; truths.len()];
        for d in order {
            let best = truths
                .iter()
                .enumerate()
                .filter(|(i, t)| !used[*i] && t.1 == d.role)
                .map(|(i, t)| (i, iou(&d.bbox, &t.0)))
                .filter(|&(_, v)| v >= iou_min)
                .max_by(|a, b| a.1.total_cmp(&b.1));
            if let Some((i, _)) = best {
                used[i] = true;
            }
            self.records.entry(d.role).or_default().push((d.confidence, best.is_some()));
        }
    }

    /// AP per role that has at least one truth.
    pub fn finish(&self) -> BTreeMap<TextRole, f64> {
        let mut out = BTreeMap::new();
        for (&role, &n) in &self.truths {
            if n == 0 {
                continue;
            }
            let mut recs = self.records.get(&role).cloned().unwrap_or_default();
            recs.sort_by(|a, b| b.0.total_cmp(&a.0));
            out.insert(role, ap_from_ranked(&recs, n));
        }
        out
    }
}

/// Area under the precision envelope of a ranked list of hits.
fn ap_from_ranked(ranked: &[(f64, bool)], n_truth: usize) -> f64 {
    let mut tp = 0usize;
    let mut points = Vec::with_capacity(ranked.len());
    for (k, &(_, hit)) in ranked.iter().enumerate() {
        tp += usize::from(hit);
        points.push((tp as f64 / n_truth as f64, tp as f64 / (k + 1) as f64));
    }
    let mut ap = 0.0;
    let mut envelope = 0.0f64;
    let mut prev_recall = 0.0;
    let envelopes: Vec<f64> = points
        .iter()
        .rev()
        .map(|p| {
            envelope = envelope.max(p.1);
            envelope
        })
        .collect::<Vec<_>>()
        .into_iter()
        .rev()
        .collect();
    for (p, e) in points.iter().zip(envelopes) {
        ap += (p.0 - prev_recall) * e;
        prev_recall = p.0;
    }
    ap
}

pub fn average_precision(dets: &[Detection], truths: &[(BBox, TextRole)], iou_min: f64) -> BTreeMap<TextRole, f64> {
    let mut acc = ApAccumulator::new();
    acc.add_image(dets, truths, iou_min);
    acc.finish()
}

/// What the pipeline said about one image.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub chart_type: ChartType,
    pub detections: Vec<Detection>,
    pub data: Option<ChartData>,
}

impl Prediction {
    /// The truth restated as a prediction.
    pub fn from_truth(truth: &GroundTruth) -> Self {
        let detections = truth
            .texts
            .iter()
            .map(|t| Detection { bbox: t.bbox, role: t.role, confidence: 1.0, text: t.string.clone() })
            .collect();
        let mut data = ChartData::empty(truth.chart_type);
        data.title = Some(truth.title.clone());
        data.x_label = truth.x_label.clone();
        data.y_label = truth.y_label.clone();
        data.marks = truth
            .marks
            .iter()
            .map(|m| DataMark {
                category: m.category.clone(),
                series: m.series.clone(),
                value: Some(m.value),
                bbox: m.bbox,
                wedge: m.wedge.map(|w| (w.start_deg, w.end_deg)),
            })
            .collect();
        Prediction { chart_type: truth.chart_type, detections, data: Some(data) }
    }
}

/// Name in `names` closest to `truth`, if close enough to count as the
/// same text.
fn closest<'a>(truth: &str, names: impl Iterator<Item = &'a str>, min_similarity: f64) -> Option<&'a str> {
    let mut best: Option<(&str, f64)> = None;
    for n in names {
        let s = similarity(n, truth);
        if s >= min_similarity - 1e-12 && best.is_none_or(|b| s > b.1) {
            best = Some((n, s));
        }
    }
    best.map(|b| b.0)
}

/// Fraction of truth strings read correctly by some prediction of the
/// same role.
pub fn text_accuracy(pred: &Prediction, truth: &GroundTruth, cfg: &EvalConfig) -> f64 {
    if truth.texts.is_empty() {
        return 1.0;
    }
    let hits = truth
        .texts
        .iter()
        .filter(|t| {
            pred.detections
                .iter()
                .any(|d| d.role == t.role && text_match_with(&d.text, &t.string, cfg.text_similarity))
        })
        .count();
    hits as f64 / truth.texts.len() as f64
}

/// Fraction of truth values matched by the predicted mark carrying the
/// same category and series.
pub fn value_accuracy(pred: &Prediction, truth: &GroundTruth, cfg: &EvalConfig) -> f64 {
    if truth.marks.is_empty() {
        return 1.0;
    }
    let Some(data) = &pred.data else { return 0.0 };
    let hits = truth
        .marks
        .iter()
        .filter(|t| {
            let Some(cat) = closest(&t.category, data.marks.iter().map(|m| m.category.as_str()), cfg.text_similarity)
            else {
                return false;
            };
            let same_cat = data.marks.iter().filter(|m| m.category == cat);
            let mark: Option<&DataMark> = match &t.series {
                None => same_cat.clone().next(),
                Some(s) => {
                    let series = closest(s, same_cat.clone().filter_map(|m| m.series.as_deref()), cfg.text_similarity);
                    series.and_then(|s| same_cat.clone().find(|m| m.series.as_deref() == Some(s)))
                }
            };
            mark.and_then(|m| m.value)
                .is_some_and(|v| value_match_with(v, t.value, cfg.value_tolerance, cfg.epsilon_zero))
        })
        .count();
    hits as f64 / truth.marks.len() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageScore {
    pub png_path: String,
    pub chart_type: ChartType,
    pub predicted: Option<ChartType>,
    /// Fractions in `[0, 1]`.
    pub text_accuracy: f64,
    pub value_accuracy: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassScores {
    pub images: usize,
    /// Percentages.
    pub text_accuracy: f64,
    pub value_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub schema_version: u32,
    pub manifest: String,
    pub oracle: bool,
    pub images: usize,
    pub per_class: BTreeMap<ChartType, ClassScores>,
    /// Rows are true classes, columns predicted classes, in
    /// [`ChartType::ALL`] order; each present row sums to 1.
    pub confusion: Vec<Vec<f64>>,
    pub confusion_counts: Vec<Vec<usize>>,
    /// Correct classifications over all evaluated images, failures
    /// included.
    pub classification_accuracy: f64,
    pub ap: BTreeMap<TextRole, f64>,
    pub mean_ap: f64,
    pub iou_min: f64,
    /// Manifest entries without a truth file.
    pub skipped: Vec<String>,
    pub per_image: Vec<ImageScore>,
    pub provenance: Provenance,
}

struct Outcome {
    score: ImageScore,
    detections: Vec<Detection>,
    truths: Vec<(BBox, TextRole)>,
}

fn predict(png: &Path, cfg: &PipelineConfig) -> Result<Prediction> {
    let img = read_png(png)?;
    let d = describe(&img, cfg, Stage::Full)?;
    let detections = d
        .regions
        .iter()
        .filter_map(|r| {
            r.role.map(|role| Detection { bbox: r.bbox, role, confidence: r.confidence, text: r.text.clone() })
        })
        .collect();
    Ok(Prediction { chart_type: d.chart_type, detections, data: d.data })
}

fn evaluate_entry(entry: &ManifestEntry, base: &Path, cfg: &PipelineConfig, oracle: bool) -> Option<Outcome> {
    let (png, truth_path) = entry.resolve(base);
    let truth = match GroundTruth::load(&truth_path) {
        Ok(t) => t,
        Err(e) => {
            log::warn!("skipping {}: truth unreadable: {e}", entry.png_path);
            return None;
        }
    };
    let truths: Vec<(BBox, TextRole)> = truth.texts.iter().map(|t| (t.bbox, t.role)).collect();
    let pred = if oracle { Ok(Prediction::from_truth(&truth)) } else { predict(&png, cfg) };
    let score = match pred {
        Ok(p) => {
            let s = ImageScore {
                png_path: entry.png_path.clone(),
                chart_type: truth.chart_type,
                predicted: Some(p.chart_type),
                text_accuracy: text_accuracy(&p, &truth, &cfg.eval),
                value_accuracy: value_accuracy(&p, &truth, &cfg.eval),
                error: None,
            };
            return Some(Outcome { score: s, detections: p.detections, truths });
        }
        Err(e) => {
            log::warn!("{}: {e}", entry.png_path);
            ImageScore {
                png_path: entry.png_path.clone(),
                chart_type: truth.chart_type,
                predicted: None,
                text_accuracy: 0.0,
                value_accuracy: 0.0,
                error: Some(e.to_string()),
            }
        }
    };
    Some(Outcome { score, detections: Vec::new(), truths })
}

fn mean(v: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        s / n as f64
    }
}

/// Run the pipeline over every chart in a manifest and score it. With
/// `oracle` the truth itself is scored, which must come out perfect.
pub fn evaluate_corpus(manifest: &Path, cfg: &PipelineConfig, oracle: bool) -> Result<EvalReport> {
    let entries = read_manifest(manifest)?;
    if entries.is_empty() {
        return Err(Error::EmptyManifest(manifest.display().to_string()));
    }
    let base = manifest.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."));
    let run = || -> Vec<Option<Outcome>> {
        entries.par_iter().map(|e| evaluate_entry(e, &base, cfg, oracle)).collect()
    };
    let outcomes = match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::invalid(e.to_string()))?
            .install(run),
        None => run(),
    };

    let mut skipped = Vec::new();
    let mut per_image = Vec::new();
    let mut acc = ApAccumulator::new();
    let mut counts = vec![vec![0usize; 5]; 5];
    for (entry, o) in entries.iter().zip(outcomes) {
        let Some(o) = o else {
            skipped.push(entry.png_path.clone());
            continue;
        };
        acc.add_image(&o.detections, &o.truths, cfg.eval.iou_min);
        if let Some(p) = o.score.predicted {
            counts[o.score.chart_type.index()][p.index()] += 1;
        }
        per_image.push(o.score);
    }

    let mut per_class = BTreeMap::new();
    for t in ChartType::ALL {
        let rows: Vec<&ImageScore> = per_image.iter().filter(|s| s.chart_type == t).collect();
        if rows.is_empty() {
            continue;
        }
        per_class.insert(
            t,
            ClassScores {
                images: rows.len(),
                text_accuracy: 100.0 * mean(rows.iter().map(|s| s.text_accuracy)),
                value_accuracy: 100.0 * mean(rows.iter().map(|s| s.value_accuracy)),
            },
        );
    }
    let confusion = counts
        .iter()
        .map(|row| {
            let n: usize = row.iter().sum();
            row.iter().map(|&c| if n == 0 { 0.0 } else { c as f64 / n as f64 }).collect()
        })
        .collect();
    let correct = per_image.iter().filter(|s| s.predicted == Some(s.chart_type)).count();
    let ap = acc.finish();
    Ok(EvalReport {
        schema_version: SCHEMA_VERSION,
        manifest: manifest.display().to_string(),
        oracle,
        images: per_image.len(),
        per_class,
        confusion,
        confusion_counts: counts,
        classification_accuracy: if per_image.is_empty() { 0.0 } else { correct as f64 / per_image.len() as f64 },
        mean_ap: mean(ap.values().copied()),
        iou_min: cfg.eval.iou_min,
        ap,
        skipped,
        per_image,
        provenance: Provenance::new(if oracle { "oracle" } else { "builtin" }, &cfg.extract),
    })
}

impl EvalReport {
    /// Plain-text rendering: confusion matrix, detection AP and
    /// per-class accuracies.
    pub fn tables(&self) -> String {
        let mut s = String::new();
        let short = ["Pie", "HBar", "VBar", "StackH", "StackV"];
        let _ = writeln!(s, "Normalized confusion matrix (rows: true class, columns: predicted)");
        let _ = write!(s, "{:<8}", "");
        for h in short {
            let _ = write!(s, "{h:>8}");
        }
        s.push('\n');
        for (i, row) in self.confusion.iter().enumerate() {
            let _ = write!(s, "{:<8}", short[i]);
            for v in row {
                let _ = write!(s, "{v:>8.4}");
            }
            s.push('\n');
        }
        let _ = writeln!(s, "Classification accuracy: {:.4}\n", self.classification_accuracy);

        let _ = writeln!(s, "Text detection AP at IoU {:.2}", self.iou_min);
        let _ = writeln!(s, "{:<14}{:>8}", "Role", "AP");
        for r in TextRole::ALL {
            if let Some(v) = self.ap.get(&r) {
                let _ = writeln!(s, "{:<14}{v:>8.4}", r.display_name());
            }
        }
        let _ = writeln!(s, "{:<14}{:>8.4}\n", "Mean", self.mean_ap);

        let _ = writeln!(s, "Average text and value accuracies (%)");
        let _ = writeln!(s, "{:<30}{:>8}{:>10}{:>10}", "Chart type", "Images", "Text", "Value");
        for (t, c) in &self.per_class {
            let _ = writeln!(
                s,
                "{:<30}{:>8}{:>10.2}{:>10.2}",
                t.display_name(),
                c.images,
                c.text_accuracy,
                c.value_accuracy
            );
        }
        if !self.skipped.is_empty() {
            let _ = writeln!(s, "\nSkipped (no truth file): {}", self.skipped.join(", "));
        }
        s
    }

    /// Write `report.json` and `tables.txt` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("report.json"), serde_json::to_string_pretty(self)?)?;
        fs::write(dir.join("tables.txt"), self.tables())?;
        Ok(())
    }
}
