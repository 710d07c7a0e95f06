use std::hint::black_box;

use chart2text::chartgen::{random_spec, render};
use chart2text::classify::{classify, ClassifyConfig};
use chart2text::extract::ExtractConfig;
use chart2text::ocr::read_line;
use chart2text::pipeline::{describe, PipelineConfig, Stage};
use chart2text::raster::{canny, median_filter, otsu_threshold, ransac_circle, to_grayscale};
use chart2text::textdetect::{detect_text_regions, DetectConfig};
use chart2text::ChartType;
use criterion::{criterion_group, criterion_main, Criterion};

fn primitives(c: &mut Criterion) {
    let (img, _) = render(&random_spec(ChartType::VBar, 1)).unwrap();
    let gray = to_grayscale(&img);
    c.bench_function("median_filter_7", |b| b.iter(|| median_filter(black_box(&gray), 7).unwrap()));
    c.bench_function("otsu_threshold", |b| b.iter(|| otsu_threshold(black_box(&gray))));
    c.bench_function("canny", |b| b.iter(|| canny(black_box(&gray), 40.0, 100.0).unwrap()));

    let points: Vec<(f64, f64)> = (0..400)
        .map(|k| {
            let a = k as f64 * 0.0157;
            if k % 5 == 0 {
                (200.0 + (k * 37 % 300) as f64, 50.0 + (k * 91 % 300) as f64)
            } else {
                (300.0 + 120.0 * a.cos(), 200.0 + 120.0 * a.sin())
            }
        })
        .collect();
    c.bench_function("ransac_circle_500", |b| b.iter(|| ransac_circle(black_box(&points), 500, 2.0, 42).unwrap()));
}

fn stages(c: &mut Criterion) {
    let (img, _) = render(&random_spec(ChartType::StackedVBar, 3)).unwrap();
    let regions = detect_text_regions(&img, &DetectConfig::default());
    c.bench_function("detect_text_regions", |b| {
        b.iter(|| detect_text_regions(black_box(&img), &DetectConfig::default()))
    });
    c.bench_function("read_line_all_regions", |b| {
        b.iter(|| {
            for r in &regions {
                black_box(read_line(&r.mask, Some(r.rotation_hint)));
            }
        })
    });
    c.bench_function("classify", |b| {
        b.iter(|| classify(black_box(&img), &ClassifyConfig::default(), &ExtractConfig::default()).unwrap())
    });
}

fn end_to_end(c: &mut Criterion) {
    let cfg = PipelineConfig::default();
    let mut group = c.benchmark_group("describe");
    group.sample_size(10);
    for t in ChartType::ALL {
        let (img, _) = render(&random_spec(t, 5)).unwrap();
        group.bench_function(t.key(), |b| b.iter(|| describe(black_box(&img), &cfg, Stage::Full).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, primitives, stages, end_to_end);
criterion_main!(benches);
