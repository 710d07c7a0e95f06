use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn chart2text(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chart2text"))
        .args(args)
        .env_remove("CHART2TEXT_CONFIG")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn gen(dir: &Path, what: &str, count: usize, seed: u64) -> PathBuf {
    let out = chart2text(&[
        "gen",
        what,
        "--count",
        &count.to_string(),
        "--seed",
        &seed.to_string(),
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    PathBuf::from(stdout(&out).trim())
}

fn first_png(manifest: &Path, prefix: &str) -> PathBuf {
    let entries: serde_json::Value = serde_json::from_str(&fs::read_to_string(manifest).unwrap()).unwrap();
    let png = entries
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["png_path"].as_str().unwrap().to_string())
        .find(|p| p.starts_with(prefix))
        .unwrap();
    manifest.parent().unwrap().join(png)
}

#[test]
fn gen_all_writes_ten_charts_and_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = gen(dir.path(), "all", 2, 0);
    assert!(manifest.ends_with("manifest.json"));
    let pngs = fs::read_dir(dir.path())
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "png"))
        .count();
    assert_eq!(pngs, 10);
}

#[test]
fn gen_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    gen(a.path(), "pie", 2, 5);
    gen(b.path(), "pie", 2, 5);
    for name in ["pie_0000.png", "pie_0001.json", "manifest.json"] {
        assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap());
    }
}

#[test]
fn describe_pie_and_repeat_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = gen(dir.path(), "pie", 1, 3);
    let png = first_png(&manifest, "pie");
    let a = chart2text(&["describe", png.to_str().unwrap()]);
    assert!(a.status.success());
    let json: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(json["chart_type"], "pie");
    assert_eq!(json["schema_version"], 1);
    assert!(json["alt_text"].as_str().unwrap().starts_with("The pie chart depicts"));
    let b = chart2text(&["describe", png.to_str().unwrap()]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn classify_stage_emits_only_the_type() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = gen(dir.path(), "stacked_vbar", 1, 1);
    let png = first_png(&manifest, "stacked_vbar");
    let out = chart2text(&["describe", png.to_str().unwrap(), "--stage", "classify"]);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["chart_type"], "stacked_vbar");
    assert!(json.get("regions").is_none() && json.get("data").is_none() && json.get("alt_text").is_none());
}

#[test]
fn corrupt_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.png");
    fs::write(&bad, b"definitely not a png").unwrap();
    assert_eq!(chart2text(&["describe", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(chart2text(&["describe", "/no/such/file.png"]).status.code(), Some(2));
}

#[test]
fn blank_image_exits_3_with_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let png = dir.path().join("blank.png");
    let img = chart2text::raster::RasterImage::filled(120, 90, chart2text::raster::Rgb::WHITE);
    chart2text::io::write_png(&img, &png).unwrap();
    let out = chart2text(&["classify", png.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["error"], "classification_failure");
}

#[test]
fn oracle_eval_is_perfect_and_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = gen(&dir.path().join("corpus"), "all", 1, 8);
    let report_dir = dir.path().join("report");
    let out = chart2text(&["eval", manifest.to_str().unwrap(), "--oracle", "--out", report_dir.to_str().unwrap()]);
    assert!(out.status.success());
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(report_dir.join("report.json")).unwrap()).unwrap();
    for (_, c) in report["per_class"].as_object().unwrap() {
        assert_eq!(c["text_accuracy"], 100.0);
        assert_eq!(c["value_accuracy"], 100.0);
    }
    assert!(report_dir.join("tables.txt").exists());
}

#[test]
fn empty_manifest_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("manifest.json");
    fs::write(&m, "[]").unwrap();
    assert_eq!(chart2text(&["eval", m.to_str().unwrap()]).status.code(), Some(4));
}

#[test]
fn config_file_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.conf");
    fs::write(&cfg, "ocr.engine = external\n").unwrap();
    let manifest = gen(dir.path(), "vbar", 1, 2);
    let png = first_png(&manifest, "vbar");
    let p = png.to_str().unwrap();
    // External engine selected without a command cannot run.
    let out = chart2text(&["--config", cfg.to_str().unwrap(), "describe", p]);
    assert_eq!(out.status.code(), Some(1));
    // The flag wins over the file.
    let out = chart2text(&["--config", cfg.to_str().unwrap(), "--ocr", "builtin", "describe", p]);
    assert!(out.status.success());

    let out = Command::new(env!("CARGO_BIN_EXE_chart2text"))
        .args(["describe", p])
        .env("CHART2TEXT_CONFIG", &cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bad_usage_exits_64() {
    assert_eq!(chart2text(&["describe"]).status.code(), Some(64));
    assert_eq!(chart2text(&["frobnicate"]).status.code(), Some(64));
}
