//! Checks shared by the property tests and the acceptance run. Each returns
//! a one-line summary on success and a description of the first failure
//! otherwise.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use chart2text::alttext;
use chart2text::chartgen::{layout, random_spec, render, render_text_crop, GroundTruth};
use chart2text::eval::{average_precision, levenshtein, text_match, value_match, Detection};
use chart2text::extract::{extract_bars, extract_pie, extract_stacks, find_pie_circle, ChartData, ExtractConfig};
use chart2text::ocr::{deskew, read_line};
use chart2text::pipeline::{describe, PipelineConfig, Stage};
use chart2text::raster::{
    histogram, otsu_threshold, ransac_circle, rotate_image, to_grayscale, BBox, GrayImage, Rgb,
};
use chart2text::{ChartType, TextRole};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Check = Result<String, String>;

fn dp_oracle(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for j in 0..=b.len() {
        d[0][j] = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let sub = d[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1]);
            d[i][j] = sub.min(d[i - 1][j] + 1).min(d[i][j - 1] + 1);
        }
    }
    d[a.len()][b.len()]
}

fn random_word(rng: &mut ChaCha8Rng) -> String {
    const ALPHABET: &[char] = &['a', 'b', 'c', 'A', ' ', '1', '%', 'é', 'z'];
    let n = rng.random_range(0..12);
    (0..n).map(|_| ALPHABET[rng.random_range(0..ALPHABET.len())]).collect()
}

pub fn levenshtein_matches_dp(pairs: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..pairs {
        let (a, b) = (random_word(&mut rng), random_word(&mut rng));
        let (got, want) = (levenshtein(&a, &b), dp_oracle(&a, &b));
        if got != want {
            return Err(format!("levenshtein({a:?}, {b:?}) = {got}, oracle {want}"));
        }
    }
    Ok(format!("{pairs} random pairs agree"))
}

pub fn match_boundaries() -> Check {
    let cases = [
        // 1 edit in 5 characters is similarity exactly 0.8.
        ("Sales", "Salez", true, text_match("Salez", "Sales")),
        ("Sales", "Sa1ez", false, text_match("Sa1ez", "Sales")),
        ("0123456789", "01234567xx", true, text_match("01234567xx", "0123456789")),
        // 2% of 50 is exactly 1.
        ("51 vs 50", "", true, value_match(51.0, 50.0)),
        ("49 vs 50", "", true, value_match(49.0, 50.0)),
        ("51.01 vs 50", "", false, value_match(51.01, 50.0)),
        ("102 vs 100", "", true, value_match(102.0, 100.0)),
    ];
    for (a, b, want, got) in cases {
        if want != got {
            return Err(format!("{a} / {b}: expected {want}"));
        }
    }
    Ok(format!("{} boundary cases", cases.len()))
}

fn det(bbox: BBox, confidence: f64) -> Detection {
    Detection { bbox, role: TextRole::XValue, confidence, text: String::new() }
}

/// Five detection sets with AP worked out by enumerating the PR curve.
pub fn ap_fixtures() -> Check {
    let t = |i: i32| BBox::new(40 * i, 0, 20, 10);
    let truths = |n: i32| (0..n).map(|i| (t(i), TextRole::XValue)).collect::<Vec<_>>();
    let stray = BBox::new(500, 500, 10, 10);
    let fixtures: Vec<(&str, Vec<Detection>, Vec<(BBox, TextRole)>, f64)> = vec![
        // (R, P) = (.5, 1), (.5, .5), (1, 2/3)
        ("hit miss hit", vec![det(t(0), 0.9), det(stray, 0.8), det(t(1), 0.7)], truths(2), 0.5 + 0.5 * 2.0 / 3.0),
        ("all hits", vec![det(t(0), 0.9), det(t(1), 0.8), det(t(2), 0.7)], truths(3), 1.0),
        // (0, 0), (1, .5)
        ("miss then hit", vec![det(stray, 0.9), det(t(0), 0.8)], truths(1), 0.5),
        // (.25, 1), (.5, 1), (.5, 2/3)
        ("half recall", vec![det(t(0), 0.9), det(t(1), 0.8), det(stray, 0.7)], truths(4), 0.5),
        // A duplicate on t0 is a false positive: (.5, 1), (.5, .5), (1, 2/3)
        ("duplicate", vec![det(t(0), 0.9), det(t(0), 0.85), det(t(1), 0.6)], truths(2), 0.5 + 0.5 * 2.0 / 3.0),
    ];
    for (name, dets, truths, want) in &fixtures {
        let got = average_precision(dets, truths, 0.5)[&TextRole::XValue];
        if (got - want).abs() > 1e-9 {
            return Err(format!("{name}: AP {got}, expected {want}"));
        }
    }
    Ok(format!("{} fixtures", fixtures.len()))
}

fn exhaustive_otsu_best(img: &GrayImage) -> (f64, Vec<f64>) {
    let hist = histogram(img);
    let n: f64 = hist.iter().map(|&c| c as f64).sum();
    let scores: Vec<f64> = (0..256)
        .map(|t| {
            let (mut n0, mut s0, mut s1) = (0.0, 0.0, 0.0);
            for (v, &c) in hist.iter().enumerate() {
                if v <= t {
                    n0 += c as f64;
                    s0 += c as f64 * v as f64;
                } else {
                    s1 += c as f64 * v as f64;
                }
            }
            let n1 = n - n0;
            if n0 == 0.0 || n1 == 0.0 {
                return 0.0;
            }
            let d = s0 / n0 - s1 / n1;
            (n0 / n) * (n1 / n) * d * d
        })
        .collect();
    (scores.iter().cloned().fold(0.0, f64::max), scores)
}

pub fn otsu_test_images() -> Vec<GrayImage> {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut out = Vec::new();
    for k in 0..40 {
        let levels: Vec<u8> = (0..rng.random_range(2..5)).map(|_| rng.random()).collect();
        let noise = (k % 4) * 6;
        let (w, h) = (rng.random_range(8..60), rng.random_range(8..60));
        let mut img = GrayImage::filled(w, h, 0u8);
        for y in 0..h {
            for x in 0..w {
                let base = levels[rng.random_range(0..levels.len())] as i32;
                let v = base + if noise > 0 { rng.random_range(-noise..=noise) } else { 0 };
                img.set(x, y, v.clamp(0, 255) as u8);
            }
        }
        out.push(img);
    }
    for (i, t) in ChartType::ALL.into_iter().enumerate() {
        let (img, _) = render(&random_spec(t, 40 + i as u64)).unwrap();
        out.push(to_grayscale(&img));
    }
    out
}

pub fn otsu_matches_exhaustive(images: &[GrayImage]) -> Check {
    for (i, img) in images.iter().enumerate() {
        let (_, t) = otsu_threshold(img);
        let (best, scores) = exhaustive_otsu_best(img);
        if best == 0.0 {
            continue;
        }
        if scores[t as usize] < best * (1.0 - 1e-9) {
            return Err(format!("image {i}: level {t} scores {}, best {best}", scores[t as usize]));
        }
    }
    Ok(format!("{} images", images.len()))
}

pub fn ransac_recovers_circles(trials: usize) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for trial in 0..trials {
        let (cx, cy, r) = (rng.random_range(100.0..300.0), rng.random_range(100.0..300.0), rng.random_range(30.0..120.0));
        let n = 250;
        let outliers = n / 5;
        let mut pts: Vec<(f64, f64)> = (0..n - outliers)
            .map(|_| {
                let a: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                let rr = r + rng.random_range(-0.5..0.5);
                (cx + rr * a.cos(), cy + rr * a.sin())
            })
            .collect();
        for _ in 0..outliers {
            pts.push((cx + rng.random_range(-2.0 * r..2.0 * r), cy + rng.random_range(-2.0 * r..2.0 * r)));
        }
        let c = ransac_circle(&pts, 500, 1.5, trial as u64).map_err(|e| e.to_string())?;
        let err = ((c.center.0 - cx).hypot(c.center.1 - cy)).max((c.radius - r).abs());
        worst = worst.max(err);
        if err > 1.0 {
            return Err(format!("trial {trial}: off by {err:.3} px"));
        }
    }
    Ok(format!("{trials} circles, worst error {worst:.3} px"))
}

fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(180.0);
    d.min(180.0 - d)
}

pub fn deskew_realigns() -> Check {
    let (fg, bg) = (Rgb::new(20, 20, 20), Rgb::new(250, 250, 250));
    let mut worst = 0.0f64;
    for text in ["Monthly revenue", "Year", "2016", "Units sold (k)"] {
        for scale in [2, 3] {
            let flat = render_text_crop(text, scale, 0, fg, bg, 6);
            for target in [45.0, 90.0] {
                let tilted = rotate_image(&flat, target);
                let (straight, undone) = deskew(&tilted);
                let (_, residual) = deskew(&straight);
                let err = angle_gap(undone, target).max(angle_gap(residual, 0.0));
                worst = worst.max(err);
                if err > 1.0 {
                    return Err(format!("{text:?} at {target}: undid {undone}, residual {residual}"));
                }
            }
        }
    }
    Ok(format!("worst error {worst:.2} deg"))
}

fn text_boxes(truth: &GroundTruth) -> Vec<BBox> {
    truth.texts.iter().map(|t| t.bbox).collect()
}

pub fn pie_shares_sum(seeds: std::ops::Range<u64>) -> Check {
    let cfg = ExtractConfig::default();
    let mut worst = 0.0f64;
    for seed in seeds.clone() {
        let (img, truth) = render(&random_spec(ChartType::Pie, seed)).unwrap();
        let (circle, _) = find_pie_circle(&img, &text_boxes(&truth), &cfg).map_err(|e| format!("seed {seed}: {e}"))?;
        let wedges = extract_pie(&img, &circle, &cfg).map_err(|e| format!("seed {seed}: {e}"))?;
        let sum: f64 = wedges.iter().map(|w| w.share).sum();
        worst = worst.max((sum - 100.0).abs());
        if (sum - 100.0).abs() > 1.0 {
            return Err(format!("seed {seed}: shares sum to {sum}"));
        }
    }
    Ok(format!("{} pies, worst |sum - 100| = {worst:.4}", seeds.count()))
}

fn category_totals(data: &ChartData) -> BTreeMap<String, f64> {
    let mut out = BTreeMap::new();
    for m in &data.marks {
        *out.entry(m.category.clone()).or_insert(0.0) += m.value.unwrap_or(f64::NAN);
    }
    out
}

/// Segment lengths against the bar they split, and segment values summed per
/// category against the whole-bar value.
pub fn stack_sums(seeds: std::ops::Range<u64>) -> Check {
    let ecfg = ExtractConfig::default();
    let pcfg = PipelineConfig::default();
    let mut worst = 0.0f64;
    let mut bars_seen = 0;
    for t in [ChartType::StackedHBar, ChartType::StackedVBar] {
        for seed in seeds.clone() {
            let (img, truth) = render(&random_spec(t, seed)).unwrap();
            for (i, bar) in extract_bars(&img, &text_boxes(&truth), &ecfg).map_err(|e| e.to_string())?.iter().enumerate() {
                let segs = extract_stacks(bar, i, &img, &ecfg).map_err(|e| e.to_string())?;
                let span: f64 = segs.iter().map(|s| s.span_px.1 - s.span_px.0).sum();
                let rel = (span - bar.length_px as f64).abs() / bar.length_px as f64;
                worst = worst.max(rel);
                if rel > 0.02 {
                    return Err(format!("{t} seed {seed} bar {i}: segments cover {span} of {} px", bar.length_px));
                }
                bars_seen += 1;
            }

            let d = describe(&img, &pcfg, Stage::Full).map_err(|e| format!("{t} seed {seed}: {e}"))?;
            let got = category_totals(d.data.as_ref().ok_or("no data")?);
            let mut want = BTreeMap::new();
            for m in &truth.marks {
                *want.entry(m.category.clone()).or_insert(0.0) += m.value;
            }
            for (cat, total) in &want {
                let sum = got.get(cat).copied().unwrap_or(f64::NAN);
                let rel = (sum - total).abs() / total;
                if !(rel <= 0.02) {
                    return Err(format!("{t} seed {seed} {cat:?}: segments sum to {sum}, bar is {total}"));
                }
                worst = worst.max(rel);
            }
        }
    }
    Ok(format!("{bars_seen} bars, worst relative gap {worst:.4}"))
}

pub fn golden_alt_texts(dir: &Path) -> Check {
    let mut n = 0;
    let mut names: Vec<_> = fs::read_dir(dir)
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    names.sort();
    for json in names {
        let data: ChartData = serde_json::from_str(&fs::read_to_string(&json).unwrap()).map_err(|e| e.to_string())?;
        let want = fs::read_to_string(json.with_extension("txt")).map_err(|e| e.to_string())?;
        let got = alttext::describe(&data).map_err(|e| e.to_string())?.text + "\n";
        if got != want {
            return Err(format!("{}:\n  got  {got}  want {want}", json.display()));
        }
        n += 1;
    }
    if n < 5 {
        return Err(format!("only {n} golden fixtures"));
    }
    Ok(format!("{n} fixtures byte-equal"))
}

/// Every text item of the given charts, drawn as the renderer draws it and
/// read back with the built-in engine.
pub fn ocr_exact(specs: impl Iterator<Item = (ChartType, u64)>) -> Check {
    let (mut n, mut charts) = (0, 0);
    for (t, seed) in specs {
        let spec = random_spec(t, seed);
        let a = &spec.aesthetics;
        let lay = layout(&spec).map_err(|e| e.to_string())?;
        for p in &lay.texts {
            let crop = render_text_crop(&p.string, a.font_scale as usize, p.rotation, a.text_color, a.background, 6);
            let (mask, _) = otsu_threshold(&to_grayscale(&crop));
            let got = read_line(&mask, Some(p.rotation as f64)).text;
            if got != p.string {
                return Err(format!("{t} seed {seed}: read {got:?} for {:?} at {} deg", p.string, p.rotation));
            }
            n += 1;
        }
        charts += 1;
    }
    Ok(format!("{n} text items from {charts} charts read exactly"))
}
