//! Command-line contracts: outputs, determinism and exit codes.

use std::path::Path;
use std::process::{Command, Output};

use fpfuse::datamodel::{synth_radio_map, SynthSpec};
use fpfuse::pipeline::Pipeline;

fn fpfuse(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fpfuse")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = fpfuse(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Fits a quick model (KF, small forest) into `dir` and returns the artifact path.
fn quick_model(dir: &Path) -> std::path::PathBuf {
    let cfg = dir.join("quick.json");
    std::fs::write(
        &cfg,
        r#"{"synth": {"n_rp": 8, "samples_per_rp": 30}, "model": {"filter": {"method": "kf"}, "rf": {"n_trees": 40}}}"#,
    )
    .unwrap();
    ok(&["fit", "--no-cv", "--config", s(&cfg), "--out", s(dir)]);
    dir.join("model.json")
}

fn first_scan() -> String {
    let map = synth_radio_map(&SynthSpec {
        n_rp: 8,
        samples_per_rp: 30,
        ..SynthSpec::default()
    })
    .unwrap();
    let v: Vec<String> = map.samples()[0].fingerprint.rss.iter().map(|x| x.to_string()).collect();
    v.join(",")
}

#[test]
fn synth_is_reproducible() {
    let d = tempfile::tempdir().unwrap();
    let (a, b) = (d.path().join("a"), d.path().join("b"));
    ok(&["synth", "--seed", "7", "--out", s(&a)]);
    ok(&["synth", "--seed", "7", "--out", s(&b)]);
    ok(&["synth", "--seed", "8", "--out", s(&d.path().join("c"))]);
    let read = |p: &Path| std::fs::read(p.join("synth.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_ne!(read(&a), read(&d.path().join("c")));
}

#[test]
fn fit_writes_versioned_artifact_and_leaves_data_untouched() {
    let d = tempfile::tempdir().unwrap();
    ok(&["synth", "--seed", "3", "--out", s(d.path())]);
    let data = d.path().join("synth.csv");
    let before = std::fs::read(&data).unwrap();
    let cfg = d.path().join("c.json");
    std::fs::write(&cfg, r#"{"model": {"filter": {"method": "ukf"}, "rf": {"n_trees": 30}}}"#).unwrap();
    ok(&["fit", "--no-cv", "--data", s(&data), "--config", s(&cfg), "--out", s(d.path())]);
    assert_eq!(std::fs::read(&data).unwrap(), before);
    let text = std::fs::read_to_string(d.path().join("model.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["format_version"], 1);
    for key in ["pre", "rf", "knn", "grid", "beta", "ph_stats", "choquet", "meta", "config"] {
        assert!(!v["pipeline"][key].is_null(), "missing {key}");
    }
    assert!(d.path().join("fit_report.json").exists());
}

#[test]
fn unreadable_data_is_an_ingest_error() {
    let d = tempfile::tempdir().unwrap();
    let out = fpfuse(&["fit", "--data", "/definitely/not/here.csv", "--out", s(d.path())]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("[ingest]"));
    assert!(!d.path().join("model.json").exists());
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(fpfuse(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(fpfuse(&["predict"]).status.code(), Some(2));
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("bad.json");
    std::fs::write(&cfg, r#"{"data": "x.csv", "synth": {}}"#).unwrap();
    assert_eq!(fpfuse(&["synth", "--config", s(&cfg), "--out", s(d.path())]).status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_fpfuse"))
        .args(["synth", "--out", s(d.path())])
        .env("FPFUSE_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_fpfuse"))
        .args(["synth", "--out", s(d.path())])
        .env("FPFUSE_THREADS", "1")
        .output()
        .unwrap();
    assert!(out.status.success());
}

#[test]
fn predict_contracts() {
    let d = tempfile::tempdir().unwrap();
    let model_path = quick_model(d.path());
    let m = s(&model_path);
    let scan = first_scan();
    let arg = format!("--scan={scan}");

    // λ = 1 returns the RF estimate
    ok(&["predict", "--model", m, &arg, "--fusion", "convex", "--lambda", "1.0", "--out", s(d.path())]);
    let csv = std::fs::read_to_string(d.path().join("predictions.csv")).unwrap();
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!((row[1], row[2]), (row[3], row[4]));

    // the PGM's brightest pixel is the reported peak cell
    let bm = d.path().join("bm.pgm");
    ok(&["predict", "--model", m, &arg, "--belief-map", s(&bm), "--out", s(d.path())]);
    let csv = std::fs::read_to_string(d.path().join("predictions.csv")).unwrap();
    let cell: usize = csv.lines().nth(1).unwrap().split(',').nth(7).unwrap().parse().unwrap();
    let pgm = std::fs::read(&bm).unwrap();
    let model = Pipeline::load(&model_path).unwrap();
    let (nx, ny) = model.grid.shape();
    let header = format!("P5\n{nx} {ny}\n255\n");
    assert!(pgm.starts_with(header.as_bytes()));
    let pixels = &pgm[header.len()..];
    assert_eq!(pixels.len(), model.grid.len());
    let peak = pixels.iter().enumerate().max_by_key(|(i, v)| (**v, std::cmp::Reverse(*i))).unwrap().0;
    assert_eq!(peak, cell);
    assert_eq!(pixels[cell], 255);

    // wrong dimension
    let out = fpfuse(&["predict", "--model", m, "--scan=-50,-60", "--out", s(d.path())]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn version_mismatch_is_rejected() {
    let d = tempfile::tempdir().unwrap();
    let model = quick_model(d.path());
    let text = std::fs::read_to_string(&model).unwrap();
    let v = d.path().join("v2.json");
    std::fs::write(&v, text.replacen("\"format_version\":1", "\"format_version\":2", 1)).unwrap();
    let out = fpfuse(&["predict", "--model", s(&v), &format!("--scan={}", first_scan()), "--out", s(d.path())]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("version"));
}

#[test]
fn export_belief_map_writes_csv_and_pgm() {
    let d = tempfile::tempdir().unwrap();
    let m = quick_model(d.path());
    ok(&["export-belief-map", "--model", s(&m), &format!("--scan={}", first_scan()), "--out", s(d.path())]);
    let csv = std::fs::read_to_string(d.path().join("belief.csv")).unwrap();
    assert!(csv.starts_with("cell_index,cx,cy,mass\n"));
    let model = Pipeline::load(&m).unwrap();
    assert_eq!(csv.lines().count(), model.grid.len() + 1);
    assert!(d.path().join("belief.pgm").exists());
}

#[test]
fn ablate_and_noise_sweep_shapes() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("c.json");
    std::fs::write(
        &cfg,
        r#"{"synth": {"n_rp": 6, "samples_per_rp": 20}, "repeats": 2,
            "model": {"filter": {"method": "kf"}, "rf": {"n_trees": 20}}}"#,
    )
    .unwrap();
    ok(&["ablate", "--config", s(&cfg), "--out", s(d.path())]);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.path().join("ablation.json")).unwrap()).unwrap();
    let variants: std::collections::BTreeSet<String> = report["summary"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["variant"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(variants.len(), 4);
    assert_eq!(report["conditions"].as_array().unwrap().len(), 2);

    ok(&["noise-sweep", "--config", s(&cfg), "--out", s(d.path())]);
    let csv = std::fs::read_to_string(d.path().join("noise_sweep.csv")).unwrap();
    let mut per_variant = std::collections::BTreeMap::<String, std::collections::BTreeSet<String>>::new();
    for line in csv.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        per_variant.entry(f[0].into()).or_default().insert(f[1].into());
    }
    assert_eq!(per_variant.len(), 4);
    assert!(per_variant.values().all(|c| c.len() == 3));
}

#[test]
fn bench_reports_stages_and_slopes() {
    let d = tempfile::tempdir().unwrap();
    let m = quick_model(d.path());
    // the tree sweep truncates the fitted forest, so it must fit inside 40 trees
    let cfg = d.path().join("b.json");
    std::fs::write(&cfg, r#"{"bench": {"trees": [10, 20, 40], "particles": [500, 1000, 2000]}}"#).unwrap();
    ok(&["bench", "--model", s(&m), "--queries", "20", "--config", s(&cfg), "--out", s(d.path())]);
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.path().join("bench.json")).unwrap()).unwrap();
    let stages: Vec<&str> = v["stages"].as_array().unwrap().iter().map(|s| s["stage"].as_str().unwrap()).collect();
    for st in ["normalize", "filter", "topology", "forest", "knn", "fusion", "total"] {
        assert!(stages.contains(&st), "missing stage {st}");
    }
    let scaling = v["scaling"].as_array().unwrap();
    let names: Vec<&str> = scaling.iter().map(|s| s["parameter"].as_str().unwrap()).collect();
    assert_eq!(names.len(), 3, "{names:?}");
    assert_eq!(scaling[0]["values"].as_array().unwrap().len(), 3);
    assert!(v["none_filter_median_s"].as_f64().unwrap() < 1e-6);
}
